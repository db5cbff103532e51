#include <cctype>
#include <fmt/core.h>
#include <map>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/cif.h>

namespace mofbind::crystal {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const auto lines = text::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (!line.empty() && line.front() == ';') {
      // multi-line text field, kept as a single token
      std::string field(line.substr(1));
      while (++li < lines.size() &&
             (lines[li].empty() || lines[li].front() != ';')) {
        field += '\n';
        field += lines[li];
      }
      tokens.push_back(std::move(field));
      continue;
    }
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '#')
        break;
      if (c == '\'' || c == '"') {
        std::size_t j = i + 1;
        while (j < line.size() &&
               !(line[j] == c &&
                 (j + 1 == line.size() ||
                  std::isspace(static_cast<unsigned char>(line[j + 1])))))
          ++j;
        tokens.emplace_back(line.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[j])))
        ++j;
      tokens.emplace_back(line.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

bool is_tag(const std::string &t) { return !t.empty() && t.front() == '_'; }

bool is_keyword(const std::string &t) {
  const auto l = text::lower(t);
  return l == "loop_" || l.rfind("data_", 0) == 0 || l.rfind("save_", 0) == 0;
}

struct Loop {
  std::vector<std::string> tags;
  std::vector<std::vector<std::string>> rows;

  int column(std::initializer_list<std::string_view> names) const {
    for (auto name : names)
      for (std::size_t i = 0; i < tags.size(); ++i)
        if (tags[i] == name)
          return static_cast<int>(i);
    return -1;
  }
};

// "10.123(4)" -> 10.123
std::optional<double> cif_number(std::string_view s) {
  const auto paren = s.find('(');
  if (paren != std::string_view::npos)
    s = s.substr(0, paren);
  return text::to_double(s);
}

std::string element_from(std::string_view symbol_or_label) {
  std::string letters;
  for (char c : symbol_or_label) {
    if (!std::isalpha(static_cast<unsigned char>(c)))
      break;
    letters.push_back(c);
  }
  if (letters.size() > 2)
    letters.resize(2);
  if (letters.size() == 2 && find_element(letters))
    return normalize_symbol(letters);
  if (!letters.empty() && find_element(letters.substr(0, 1)))
    return normalize_symbol(letters.substr(0, 1));
  throw ParseError(
      fmt::format("unknown element symbol in '{}'", symbol_or_label));
}

} // namespace

CrystalStructure parse_cif(std::string_view text) {
  const auto tokens = tokenize(text);
  std::map<std::string, std::string> items;
  std::vector<Loop> loops;

  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::string &t = tokens[i];
    if (text::lower(t) == "loop_") {
      Loop loop;
      ++i;
      while (i < tokens.size() && is_tag(tokens[i]))
        loop.tags.push_back(text::lower(tokens[i++]));
      std::vector<std::string> values;
      while (i < tokens.size() && !is_tag(tokens[i]) && !is_keyword(tokens[i]))
        values.push_back(tokens[i++]);
      if (loop.tags.empty())
        throw ParseError("loop_ without tags");
      if (values.size() % loop.tags.size() != 0)
        throw ParseError(fmt::format("loop starting with '{}' has {} values, "
                                     "not a multiple of its {} columns",
                                     loop.tags.front(), values.size(),
                                     loop.tags.size()));
      for (std::size_t r = 0; r < values.size(); r += loop.tags.size())
        loop.rows.emplace_back(values.begin() + static_cast<long>(r),
                               values.begin() +
                                   static_cast<long>(r + loop.tags.size()));
      loops.push_back(std::move(loop));
    } else if (is_tag(t)) {
      if (i + 1 >= tokens.size())
        throw ParseError(fmt::format("tag '{}' has no value", t));
      items[text::lower(t)] = tokens[i + 1];
      i += 2;
    } else {
      ++i;
    }
  }

  const auto cell_value = [&](const char *tag) {
    auto it = items.find(tag);
    if (it == items.end())
      throw ParseError(fmt::format("missing required tag '{}'", tag));
    auto v = cif_number(it->second);
    if (!v)
      throw ParseError(
          fmt::format("tag '{}' has non-numeric value '{}'", tag, it->second));
    return *v;
  };
  const double a = cell_value("_cell_length_a");
  const double b = cell_value("_cell_length_b");
  const double c = cell_value("_cell_length_c");
  const double alpha = cell_value("_cell_angle_alpha");
  const double beta = cell_value("_cell_angle_beta");
  const double gamma = cell_value("_cell_angle_gamma");

  CrystalStructure structure{Lattice(a, b, c, alpha, beta, gamma), {}, {}};

  const Loop *atom_loop = nullptr;
  const Loop *symm_loop = nullptr;
  for (const auto &loop : loops) {
    if (loop.column({"_atom_site_fract_x"}) >= 0)
      atom_loop = &loop;
    if (loop.column({"_symmetry_equiv_pos_as_xyz",
                     "_space_group_symop_operation_xyz"}) >= 0)
      symm_loop = &loop;
  }
  if (!atom_loop)
    throw ParseError("missing required tag '_atom_site_fract_x'");

  const int col_label = atom_loop->column({"_atom_site_label"});
  const int col_type = atom_loop->column({"_atom_site_type_symbol"});
  const int col_x = atom_loop->column({"_atom_site_fract_x"});
  const int col_y = atom_loop->column({"_atom_site_fract_y"});
  const int col_z = atom_loop->column({"_atom_site_fract_z"});
  if (col_y < 0)
    throw ParseError("missing required tag '_atom_site_fract_y'");
  if (col_z < 0)
    throw ParseError("missing required tag '_atom_site_fract_z'");
  if (col_label < 0 && col_type < 0)
    throw ParseError("missing required tag '_atom_site_type_symbol'");

  for (std::size_t r = 0; r < atom_loop->rows.size(); ++r) {
    const auto &row = atom_loop->rows[r];
    AtomSite site;
    site.label = col_label >= 0 ? row[static_cast<std::size_t>(col_label)]
                                : fmt::format("A{}", r + 1);
    site.element = element_from(col_type >= 0
                                    ? row[static_cast<std::size_t>(col_type)]
                                    : site.label);
    Vec3 frac;
    const int cols[3] = {col_x, col_y, col_z};
    for (int k = 0; k < 3; ++k) {
      const auto &raw = row[static_cast<std::size_t>(cols[k])];
      auto v = cif_number(raw);
      if (!v)
        throw ParseError(fmt::format(
            "site '{}' has non-numeric fractional coordinate '{}'", site.label,
            raw));
      frac(k) = *v;
    }
    site.frac = wrap_frac(frac);
    structure.sites.push_back(std::move(site));
  }

  structure.symmetry_ops.push_back(SymmetryOperation::identity());
  if (symm_loop) {
    const int col = symm_loop->column(
        {"_symmetry_equiv_pos_as_xyz", "_space_group_symop_operation_xyz"});
    for (const auto &row : symm_loop->rows) {
      auto op = SymmetryOperation::parse(row[static_cast<std::size_t>(col)]);
      if (op.is_identity())
        continue;
      bool seen = false;
      for (const auto &existing : structure.symmetry_ops)
        seen = seen || existing == op;
      if (!seen)
        structure.symmetry_ops.push_back(std::move(op));
    }
  }
  return structure;
}

CrystalStructure read_cif(const std::string &path) {
  return parse_cif(text::read_file(path));
}

} // namespace mofbind::crystal
