#include <fmt/core.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/xyz.h>

namespace mofbind::crystal {

std::string write_xyz(const AtomCollection &atoms, std::string_view comment) {
  if (atoms.empty())
    throw ArgumentError("empty structure");
  std::string out = fmt::format("{}\n", atoms.size());
  // the comment line must stay a single line
  std::string c(comment);
  for (char &ch : c)
    if (ch == '\n' || ch == '\r')
      ch = ' ';
  out += c;
  out += '\n';
  for (const auto &atom : atoms.atoms)
    out += fmt::format("{:<2s} {:20.12f} {:20.12f} {:20.12f}\n", atom.element,
                       atom.position(0), atom.position(1), atom.position(2));
  return out;
}

AtomCollection parse_xyz(std::string_view text) {
  const auto lines = text::split_lines(text);
  if (lines.empty())
    throw ParseError("empty XYZ input");
  const auto count = text::to_long(lines[0]);
  if (!count || *count < 0)
    throw ParseError(fmt::format("XYZ header '{}' is not an atom count",
                                 text::trim(lines[0])));
  std::vector<std::string_view> body;
  for (std::size_t i = 2; i < lines.size(); ++i)
    if (!text::trim(lines[i]).empty())
      body.push_back(lines[i]);
  if (static_cast<long>(body.size()) != *count)
    throw ParseError(fmt::format("XYZ header declares {} atoms but {} found",
                                 *count, body.size()));
  AtomCollection out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto fields = text::split_whitespace(body[i]);
    if (fields.size() < 4)
      throw ParseError(fmt::format("XYZ line {} is incomplete: '{}'", i + 3,
                                   text::trim(body[i])));
    Atom atom;
    const auto &el = find_element(fields[0]);
    if (!el)
      throw ParseError(fmt::format("unknown element symbol '{}' on line {}",
                                   fields[0], i + 3));
    atom.element = std::string(el->symbol);
    for (int k = 0; k < 3; ++k) {
      auto v = text::to_double(fields[static_cast<std::size_t>(k + 1)]);
      if (!v)
        throw ParseError(fmt::format("unparseable coordinate '{}' on line {}",
                                     fields[static_cast<std::size_t>(k + 1)],
                                     i + 3));
      atom.position(k) = *v;
    }
    atom.origin = {fmt::format("xyz{}", i), {0, 0, 0}};
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

AtomCollection read_xyz(const std::string &path) {
  return parse_xyz(text::read_file(path));
}

void write_xyz_file(const std::string &path, const AtomCollection &atoms,
                    std::string_view comment) {
  text::write_file(path, write_xyz(atoms, comment));
}

} // namespace mofbind::crystal
