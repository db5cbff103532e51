#include <cctype>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/symmetry.h>

namespace mofbind::crystal {

namespace {

// One component such as "-x+y+1/2" -> coefficient row and constant.
bool parse_component(std::string_view s, Vec3 &row, double &constant) {
  row.setZero();
  constant = 0.0;
  std::string compact;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      compact.push_back(static_cast<char>(std::tolower(c)));
  if (compact.empty())
    return false;
  std::size_t i = 0;
  bool any = false;
  while (i < compact.size()) {
    double sign = 1.0;
    if (compact[i] == '+' || compact[i] == '-') {
      sign = compact[i] == '-' ? -1.0 : 1.0;
      ++i;
    } else if (any) {
      return false;
    }
    if (i >= compact.size())
      return false;
    const char c = compact[i];
    if (c == 'x' || c == 'y' || c == 'z') {
      row(c - 'x') += sign;
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < compact.size() &&
             (std::isdigit(static_cast<unsigned char>(compact[j])) ||
              compact[j] == '.' || compact[j] == '/'))
        ++j;
      const std::string_view token(compact.data() + i, j - i);
      const auto slash = token.find('/');
      double value = 0.0;
      if (slash == std::string_view::npos) {
        auto v = text::to_double(token);
        if (!v)
          return false;
        value = *v;
      } else {
        auto p = text::to_double(token.substr(0, slash));
        auto q = text::to_double(token.substr(slash + 1));
        if (!p || !q || *q == 0.0)
          return false;
        value = *p / *q;
      }
      constant += sign * value;
      i = j;
    } else {
      return false;
    }
    any = true;
  }
  return any;
}

} // namespace

SymmetryOperation::SymmetryOperation()
    : m_rotation(Mat3::Identity()), m_translation(Vec3::Zero()),
      m_text("x,y,z") {}

SymmetryOperation SymmetryOperation::parse(std::string_view text) {
  SymmetryOperation op;
  op.m_text = std::string(text::trim(text));
  const auto parts = text::split(text::trim(text), ',');
  if (parts.size() != 3)
    throw ParseError(
        fmt::format("malformed symmetry operator '{}'", op.m_text));
  for (int k = 0; k < 3; ++k) {
    Vec3 row;
    double constant = 0.0;
    if (!parse_component(parts[static_cast<std::size_t>(k)], row, constant))
      throw ParseError(
          fmt::format("malformed symmetry operator '{}'", op.m_text));
    op.m_rotation.row(k) = row.transpose();
    op.m_translation(k) = constant;
  }
  if (std::abs(op.m_rotation.determinant()) < 0.5)
    throw ParseError(
        fmt::format("singular symmetry operator '{}'", op.m_text));
  return op;
}

bool SymmetryOperation::is_identity() const {
  if (m_rotation != Mat3::Identity())
    return false;
  for (int i = 0; i < 3; ++i) {
    const double t = m_translation(i) - std::round(m_translation(i));
    if (std::abs(t) > 1e-12)
      return false;
  }
  return true;
}

} // namespace mofbind::crystal
