#include "carleman/spec_parser.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace carleman {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::invalid_argument("system spec line " + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Parse "[v1 v2 ... vn]" starting at pos; advances pos past the bracket.
std::vector<std::string> bracket_list(const std::string& s, std::size_t& pos, int line) {
  pos = s.find_first_not_of(" \t", pos);
  if (pos == std::string::npos || s[pos] != '[') fail(line, "expected '['");
  const auto close = s.find(']', pos);
  if (close == std::string::npos) fail(line, "unterminated '['");
  std::istringstream in(s.substr(pos + 1, close - pos - 1));
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  pos = close + 1;
  return tokens;
}

}  // namespace

ParsedSystem parse_field(std::istream& in) {
  int dim = -1;
  double t0 = 0.0;
  bool saw_t0 = false;
  std::vector<std::pair<MultiIndex, Eigen::VectorXd>> terms;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = strip(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = strip(s.substr(0, eq));
    const std::string value = strip(s.substr(eq + 1));

    if (key == "dimension") {
      if (dim != -1) fail(line, "duplicate 'dimension'");
      std::size_t used = 0;
      try {
        dim = std::stoi(value, &used);
      } catch (const std::exception&) {
        fail(line, "'dimension' is not an integer: " + value);
      }
      if (used != value.size()) fail(line, "trailing characters after 'dimension'");
      if (dim < 1) fail(line, "'dimension' must be >= 1");
    } else if (key == "t0") {
      if (saw_t0) fail(line, "duplicate 't0'");
      std::size_t used = 0;
      try {
        t0 = std::stod(value, &used);
      } catch (const std::exception&) {
        fail(line, "'t0' is not a number: " + value);
      }
      if (used != value.size()) fail(line, "trailing characters after 't0'");
      saw_t0 = true;
    } else if (key == "term") {
      if (dim == -1) fail(line, "'term' before 'dimension'");
      std::size_t pos = 0;
      const auto alpha_tok = bracket_list(value, pos, line);
      const auto coeff_tok = bracket_list(value, pos, line);
      if (!strip(value.substr(pos)).empty()) fail(line, "trailing characters after term");
      if (static_cast<int>(alpha_tok.size()) != dim)
        fail(line, "exponent list length != dimension");
      if (static_cast<int>(coeff_tok.size()) != dim)
        fail(line, "coefficient list length != dimension");
      std::vector<int> exponents(alpha_tok.size());
      for (std::size_t i = 0; i < alpha_tok.size(); ++i) {
        try {
          std::size_t used = 0;
          exponents[i] = std::stoi(alpha_tok[i], &used);
          if (used != alpha_tok[i].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
          fail(line, "exponent is not an integer: " + alpha_tok[i]);
        }
        if (exponents[i] < 0) fail(line, "negative exponent: " + alpha_tok[i]);
      }
      Eigen::VectorXd coeff(dim);
      for (std::size_t i = 0; i < coeff_tok.size(); ++i) {
        try {
          std::size_t used = 0;
          coeff[static_cast<Eigen::Index>(i)] = std::stod(coeff_tok[i], &used);
          if (used != coeff_tok[i].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
          fail(line, "coefficient is not a number: " + coeff_tok[i]);
        }
      }
      terms.emplace_back(MultiIndex(std::move(exponents)), std::move(coeff));
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  if (dim == -1) throw std::invalid_argument("system spec: missing 'dimension'");
  return ParsedSystem{MaclaurinField::polynomial(dim, terms), t0};
}

ParsedSystem parse_field(const std::string& text) {
  std::istringstream in(text);
  return parse_field(in);
}

ParsedSystem parse_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open system spec: " + path);
  return parse_field(in);
}

}  // namespace carleman
