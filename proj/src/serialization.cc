//
// Copyright 2026 The R2DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "r2dp/serialization.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fmt/format.h"
#include "r2dp/errors.h"
#include "r2dp/special_functions.h"

namespace r2dp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct ParsedTerm {
  std::optional<double> coefficient;
  std::string name;
  std::vector<std::pair<std::string, double>> args;
};

// Recursive-descent reader for  [number '*'] name '(' key '=' number, ... ')'
// terms joined by '+'.
class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  std::vector<ParsedTerm> ReadAll() {
    std::vector<ParsedTerm> terms;
    SkipSpace();
    if (AtEnd()) Fail("empty expression");
    terms.push_back(ReadTerm());
    SkipSpace();
    while (!AtEnd()) {
      Expect('+');
      terms.push_back(ReadTerm());
      SkipSpace();
    }
    return terms;
  }

 private:
  ParsedTerm ReadTerm() {
    ParsedTerm term;
    SkipSpace();
    if (!AtEnd() && !std::isalpha(static_cast<unsigned char>(Peek()))) {
      term.coefficient = ReadNumber();
      Expect('*');
    }
    term.name = ReadName();
    Expect('(');
    SkipSpace();
    if (!AtEnd() && Peek() == ')') {
      ++pos_;
      return term;
    }
    for (;;) {
      std::string key = ReadName();
      Expect('=');
      const double value = ReadNumber();
      term.args.emplace_back(std::move(key), value);
      SkipSpace();
      if (AtEnd()) Fail("unterminated argument list");
      if (Peek() == ')') {
        ++pos_;
        break;
      }
      Expect(',');
    }
    return term;
  }

  std::string ReadName() {
    SkipSpace();
    const std::size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '_')) {
      ++pos_;
    }
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(text_[start]))) {
      Fail("expected a name");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double ReadNumber() {
    SkipSpace();
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) Fail("expected a number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    if (std::isnan(value)) Fail("NaN is not a valid parameter");
    return value;
  }

  void Expect(char c) {
    SkipSpace();
    if (AtEnd() || Peek() != c) Fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(Peek()))) ++pos_;
  }
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(fmt::format("{} at offset {} in '{}'", what, pos_, text_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Named arguments in the order of `names`; `defaults` fills omitted ones.
std::vector<double> Arrange(const ParsedTerm& term, const std::vector<std::string_view>& names,
                            const std::map<std::string_view, double>& defaults = {}) {
  std::vector<std::optional<double>> slots(names.size());
  for (const auto& [key, value] : term.args) {
    bool matched = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == key) {
        if (slots[i]) throw ParseError(fmt::format("{}: duplicate '{}'", term.name, key));
        slots[i] = value;
        matched = true;
      }
    }
    if (!matched) throw ParseError(fmt::format("{}: unknown parameter '{}'", term.name, key));
  }
  std::vector<double> values;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!slots[i]) {
      const auto it = defaults.find(names[i]);
      if (it == defaults.end()) {
        throw ParseError(fmt::format("{}: missing parameter '{}'", term.name, names[i]));
      }
      slots[i] = it->second;
    }
    values.push_back(*slots[i]);
  }
  return values;
}

MgfDist DistFromTerm(const ParsedTerm& term) {
  const Family family = FamilyFromName(term.name);
  std::map<std::string_view, double> defaults;
  if (family == Family::kTruncGaussian) defaults["b"] = kInf;
  return MgfDist::FromParameters(family, Arrange(term, FamilyParameterNames(family), defaults));
}

std::string Get(const boost::property_tree::ptree& tree, const std::string& key) {
  const auto value = tree.get_optional<std::string>(key);
  if (!value) throw ParseError(fmt::format("record is missing '{}'", key));
  return *value;
}

bool ParseBool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError(fmt::format("expected true or false, got '{}'", text));
}

}  // namespace

std::string FormatNumber(double value) { return fmt::format("{}", value); }

double ParseNumber(std::string_view text) {
  const std::string s(text);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("expected a number, got an empty string");
  char* end = nullptr;
  const double value = std::strtod(s.c_str() + first, &end);
  if (end == s.c_str() + first) throw ParseError(fmt::format("not a number: '{}'", text));
  for (const char* p = end; *p != '\0'; ++p) {
    if (!std::isspace(static_cast<unsigned char>(*p))) {
      throw ParseError(fmt::format("trailing characters in number '{}'", text));
    }
  }
  if (std::isnan(value)) throw ParseError("NaN is not a valid number");
  return value;
}

std::string FormatDist(const MgfDist& dist) {
  const std::vector<std::string_view> names = FamilyParameterNames(dist.family());
  const std::vector<double> values = dist.parameters();
  std::string out = fmt::format("{}(", FamilyName(dist.family()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += fmt::format("{}{}={}", i == 0 ? "" : ", ", names[i], FormatNumber(values[i]));
  }
  return out + ")";
}

MgfDist ParseDist(std::string_view text) {
  const std::vector<ParsedTerm> terms = TermReader(text).ReadAll();
  if (terms.size() != 1 || terms[0].coefficient) {
    throw ParseError(fmt::format("expected a single distribution, got '{}'", text));
  }
  return DistFromTerm(terms[0]);
}

std::string FormatCombo(const LinearCombo& combo) {
  std::string out;
  for (const ComboTerm& term : combo.terms()) {
    if (!out.empty()) out += " + ";
    out += fmt::format("{}*{}", FormatNumber(term.coefficient), FormatDist(term.dist));
  }
  return out;
}

LinearCombo ParseCombo(std::string_view text) {
  std::vector<ComboTerm> terms;
  for (const ParsedTerm& term : TermReader(text).ReadAll()) {
    terms.push_back({term.coefficient.value_or(1.0), DistFromTerm(term)});
  }
  return LinearCombo(std::move(terms));
}

std::string FormatMechanism(const NoiseMechanism& mechanism) {
  return std::visit(
      Overloaded{
          [](const R2dpMechanism& m) { return FormatCombo(m.combo); },
          [](const LaplaceMechanism& m) {
            return fmt::format("laplace(b={})", FormatNumber(m.b));
          },
          [](const StaircaseMechanism& m) {
            const Staircase s(m.epsilon, m.sensitivity, m.gamma_s);
            return fmt::format("staircase(epsilon={}, sensitivity={}, gamma={})",
                               FormatNumber(m.epsilon), FormatNumber(m.sensitivity),
                               FormatNumber(s.gamma_s()));
          },
          [](const GaussianMechanism& m) {
            return fmt::format("gaussian(sigma={})", FormatNumber(m.sigma));
          },
          [](const RandomizedResponseMechanism& m) {
            return fmt::format("randomized_response(p={})", FormatNumber(m.p));
          },
      },
      mechanism);
}

NoiseMechanism ParseMechanism(std::string_view text) {
  const std::vector<ParsedTerm> terms = TermReader(text).ReadAll();
  if (terms.size() == 1 && !terms[0].coefficient) {
    const ParsedTerm& t = terms[0];
    NoiseMechanism mechanism = LaplaceMechanism{1.0};
    bool matched = true;
    if (t.name == "laplace") {
      mechanism = LaplaceMechanism{Arrange(t, {"b"})[0]};
    } else if (t.name == "staircase") {
      const auto v = Arrange(t, {"epsilon", "sensitivity", "gamma"}, {{"gamma", -1.0}});
      mechanism = StaircaseMechanism{v[0], v[1], v[2]};
    } else if (t.name == "gaussian") {
      mechanism = GaussianMechanism{Arrange(t, {"sigma"})[0]};
    } else if (t.name == "randomized_response") {
      mechanism = RandomizedResponseMechanism{Arrange(t, {"p"})[0]};
    } else {
      matched = false;
    }
    if (matched) {
      ValidateMechanism(mechanism);
      return mechanism;
    }
  }
  return R2dpMechanism{ParseCombo(text)};
}

void WriteCalibratedRecord(const CalibratedMechanism& result, std::ostream& out) {
  boost::property_tree::ptree tree;
  tree.put("mechanism.combo", FormatCombo(result.combo));
  tree.put("mechanism.target_epsilon", FormatNumber(result.target_epsilon));
  tree.put("mechanism.achieved_epsilon", FormatNumber(result.achieved_epsilon));
  tree.put("mechanism.sensitivity", FormatNumber(result.sensitivity));
  tree.put("mechanism.metric", std::string(MetricName(result.metric)));
  tree.put("mechanism.metric_param", FormatNumber(result.metric_parameter));
  tree.put("mechanism.predicted_utility", FormatNumber(result.predicted_utility));
  tree.put("mechanism.baseline_laplace_utility", FormatNumber(result.baseline_laplace_utility));
  if (result.staircase_utility) {
    tree.put("mechanism.staircase_utility", FormatNumber(*result.staircase_utility));
  }
  const SolverDiagnostics& d = result.diagnostics;
  tree.put("diagnostics.evaluations", std::to_string(d.evaluations));
  tree.put("diagnostics.constraint_residual", FormatNumber(d.constraint_residual));
  tree.put("diagnostics.winning_restart", std::to_string(d.winning_restart));
  tree.put("diagnostics.hit_box_boundary", d.hit_box_boundary ? "true" : "false");
  tree.put("diagnostics.budget_exhausted", d.budget_exhausted ? "true" : "false");
  tree.put("diagnostics.filtered_candidates", std::to_string(d.filtered_candidates));
  tree.put("diagnostics.failed_candidates", std::to_string(d.failed_candidates));
  boost::property_tree::write_ini(out, tree);
}

CalibratedMechanism ReadCalibratedRecord(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(fmt::format("malformed record: {}", e.what()));
  }
  const auto number = [&](const std::string& key) { return ParseNumber(Get(tree, key)); };
  const auto integer = [&](const std::string& key) {
    return static_cast<long long>(std::llround(number(key)));
  };
  SolverDiagnostics d;
  d.evaluations = integer("diagnostics.evaluations");
  d.constraint_residual = number("diagnostics.constraint_residual");
  d.winning_restart = static_cast<int>(integer("diagnostics.winning_restart"));
  d.hit_box_boundary = ParseBool(Get(tree, "diagnostics.hit_box_boundary"));
  d.budget_exhausted = ParseBool(Get(tree, "diagnostics.budget_exhausted"));
  d.filtered_candidates = integer("diagnostics.filtered_candidates");
  d.failed_candidates = integer("diagnostics.failed_candidates");
  std::optional<double> staircase;
  if (tree.get_optional<std::string>("mechanism.staircase_utility")) {
    staircase = number("mechanism.staircase_utility");
  }
  return CalibratedMechanism{ParseCombo(Get(tree, "mechanism.combo")),
                             number("mechanism.achieved_epsilon"),
                             number("mechanism.target_epsilon"),
                             number("mechanism.sensitivity"),
                             MetricFromName(Get(tree, "mechanism.metric")),
                             number("mechanism.metric_param"),
                             number("mechanism.predicted_utility"),
                             number("mechanism.baseline_laplace_utility"),
                             staircase,
                             d};
}

}  // namespace r2dp
