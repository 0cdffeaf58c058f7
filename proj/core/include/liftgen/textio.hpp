#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liftgen/logic.hpp"
#include "liftgen/numeric.hpp"

namespace liftgen {

struct WeightPair {
  BigRational positive{1};
  BigRational negative{1};
  friend bool operator==(const WeightPair&, const WeightPair&) = default;
};

using Weighting = std::map<std::string, WeightPair>;

struct Problem {
  Formula sentence;
  int domain_size = 1;
  Vocabulary vocabulary;
  Weighting weights;         // missing entries mean (1, 1)
  Formula cardinality;       // Boolean combination of |P| op q atoms, ⊤ when absent
  // Predicates reported in output models; empty means the whole vocabulary.
  std::vector<std::string> visible;

  WeightPair weight(const std::string& predicate) const;
  std::vector<std::string> output_predicates() const;
};

// Builds a problem, collecting the vocabulary and moving top-level conjuncts
// made only of cardinality atoms into the cardinality constraint.
Problem make_problem(Formula sentence, int domain_size, Weighting weights = {},
                     Formula cardinality = Formula::top());

struct MlnFormula {
  std::optional<BigRational> weight;  // nullopt: hard formula
  Formula formula;
};

struct MlnSpec {
  int domain_size = 1;
  std::vector<MlnFormula> formulas;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct ParseOptions {
  // Names beginning with '_' are reserved for generated predicates.
  bool allow_reserved = false;
  int line = 1;
  int column = 1;
};

Formula parse_formula(std::string_view text, const ParseOptions& options = {});
Problem parse_problem(std::string_view text, const ParseOptions& options = {});
MlnSpec parse_mln(std::string_view text);

std::string format_problem(const Problem& problem);
std::string format_mln(const MlnSpec& spec);
std::string format_model(const Model& model);
Model parse_model(std::string_view line, const Vocabulary& vocabulary, int domain_size);
// One JSON object per model: {"model": [...], "probability": "p/q"}.
std::string format_model_json(const Model& model, const BigRational* probability);

std::uint64_t problem_hash(const Problem& problem);
std::string stream_header(std::uint64_t seed, const Problem& problem);

}  // namespace liftgen
