#include "liftgen/textio.hpp"

#include <cctype>
#include <iomanip>
#include <json.hpp>
#include <sstream>

namespace liftgen {

WeightPair Problem::weight(const std::string& predicate) const {
  auto it = weights.find(predicate);
  return it == weights.end() ? WeightPair{} : it->second;
}

std::vector<std::string> Problem::output_predicates() const {
  if (!visible.empty()) return visible;
  std::vector<std::string> out;
  for (const auto& [name, arity] : vocabulary) out.push_back(name);
  return out;
}

namespace {

bool only_cardinality(const Formula& f) {
  switch (f.kind()) {
    case Connective::Cardinality:
    case Connective::Top:
    case Connective::Bottom:
      return true;
    case Connective::Atom:
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting:
      return false;
    default:
      for (const auto& c : f.children())
        if (!only_cardinality(c)) return false;
      return true;
  }
}

}  // namespace

Problem make_problem(Formula sentence, int domain_size, Weighting weights, Formula cardinality) {
  if (domain_size < 1) throw Error("domain size must be positive");
  Problem p;
  p.domain_size = domain_size;
  std::vector<Formula> body;
  std::vector<Formula> cc;
  if (!cardinality.is_top()) cc.push_back(cardinality);
  for (const auto& c : conjuncts(sentence)) {
    if (has_cardinality(c) && only_cardinality(c)) {
      cc.push_back(c);
    } else {
      body.push_back(c);
    }
  }
  p.sentence = Formula::conjunction(std::move(body));
  p.cardinality = Formula::conjunction(std::move(cc));
  p.vocabulary = vocabulary_of(sentence);
  for (const auto& name : cardinality_predicates(p.cardinality))
    if (!p.vocabulary.contains(name))
      throw Error("cardinality constraint on unknown predicate " + name);
  for (const auto& [name, wp] : weights) {
    if (!p.vocabulary.contains(name)) throw Error("weight given for unknown predicate " + name);
  }
  p.weights = std::move(weights);
  return p;
}

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Formula lexer and parser

namespace {

enum class Tok {
  End,
  Ident,
  Int,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Not,
  And,
  Bar,
  Arrow,
  DoubleArrow,
  Eq,
  Le,
  Ge,
  Lt,
  Gt
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, column = 1;
};

class Lexer {
 public:
  Lexer(std::string_view text, int line, int column) : text_(text), line_(line), col_(column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        t.kind = Tok::Int;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (match("<->")) {
        t.kind = Tok::DoubleArrow;
      } else if (match("->")) {
        t.kind = Tok::Arrow;
      } else if (match("<=")) {
        t.kind = Tok::Le;
      } else if (match(">=")) {
        t.kind = Tok::Ge;
      } else {
        advance();
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '[': t.kind = Tok::LBracket; break;
          case ']': t.kind = Tok::RBracket; break;
          case ',': t.kind = Tok::Comma; break;
          case ':': t.kind = Tok::Colon; break;
          case '~': t.kind = Tok::Not; break;
          case '&': t.kind = Tok::And; break;
          case '|': t.kind = Tok::Bar; break;
          case '=': t.kind = Tok::Eq; break;
          case '<': t.kind = Tok::Lt; break;
          case '>': t.kind = Tok::Gt; break;
          default:
            throw ParseError(t.line, t.column, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }
  bool match(std::string_view s) {
    if (text_.substr(pos_, s.size()) != s) return false;
    for (std::size_t i = 0; i < s.size(); ++i) advance();
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_, col_;
};

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const ParseOptions& options)
      : tokens_(Lexer(text, options.line, options.column).run()), options_(options) {}

  Formula parse_all() {
    Formula f = parse_iff();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + describe(peek()) + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found '" + describe(peek()) + "'");
    return next();
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Ident:
      case Tok::Int: return t.text;
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::LBracket: return "[";
      case Tok::RBracket: return "]";
      case Tok::Comma: return ",";
      case Tok::Colon: return ":";
      case Tok::Not: return "~";
      case Tok::And: return "&";
      case Tok::Bar: return "|";
      case Tok::Arrow: return "->";
      case Tok::DoubleArrow: return "<->";
      case Tok::Eq: return "=";
      case Tok::Le: return "<=";
      case Tok::Ge: return ">=";
      case Tok::Lt: return "<";
      case Tok::Gt: return ">";
    }
    return "?";
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (accept(Tok::DoubleArrow)) return Formula::iff(lhs, parse_iff());
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept(Tok::Arrow)) return Formula::implies(lhs, parse_implies());
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept(Tok::Bar)) parts.push_back(parse_and());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept(Tok::And)) parts.push_back(parse_unary());
    return Formula::conjunction(std::move(parts));
  }

  Var parse_variable(const Token& t) {
    if (t.kind != Tok::Ident) fail(t, "expected a variable, found '" + describe(t) + "'");
    if (t.text == "x") return Var::X;
    if (t.text == "y") return Var::Y;
    fail(t, "third variable '" + t.text + "': only the variables x and y are supported");
  }

  Formula parse_unary() {
    const Token& t = peek();
    if (accept(Tok::Not)) return Formula::negation(parse_unary());
    if (t.kind == Tok::Ident && (t.text == "forall" || t.text == "exists")) {
      next();
      bool universal = t.text == "forall";
      std::optional<std::pair<CountMode, int>> counting;
      if (!universal && accept(Tok::LBracket)) {
        const Token& op = next();
        CountMode mode;
        if (op.kind == Tok::Eq) {
          mode = CountMode::Exactly;
        } else if (op.kind == Tok::Le) {
          mode = CountMode::AtMost;
        } else if (op.kind == Tok::Ge) {
          mode = CountMode::AtLeast;
        } else {
          fail(op, "expected =, <= or >= in counting quantifier");
        }
        const Token& k = expect(Tok::Int, "an integer");
        expect(Tok::RBracket, "]");
        counting = std::make_pair(mode, parse_int(k));
      }
      Var v = parse_variable(next());
      accept(Tok::Colon);
      Formula body = parse_iff();
      if (counting) return Formula::counting(v, counting->first, counting->second, body);
      return universal ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    return parse_primary();
  }

  static int parse_int(const Token& t) {
    if (t.text.size() > 9) fail(t, "integer too large");
    return std::stoi(t.text);
  }

  void check_name(const Token& t) {
    if (!options_.allow_reserved && t.text[0] == '_')
      fail(t, "names beginning with '_' are reserved: " + t.text);
  }

  Formula parse_primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::LParen: {
        Formula f = parse_iff();
        expect(Tok::RParen, ")");
        return f;
      }
      case Tok::Bar: {
        const Token& name = expect(Tok::Ident, "a predicate name");
        check_name(name);
        expect(Tok::Bar, "|");
        const Token& op = next();
        Comparison cmp;
        switch (op.kind) {
          case Tok::Eq: cmp = Comparison::Eq; break;
          case Tok::Le: cmp = Comparison::Le; break;
          case Tok::Ge: cmp = Comparison::Ge; break;
          case Tok::Lt: cmp = Comparison::Lt; break;
          case Tok::Gt: cmp = Comparison::Gt; break;
          default: fail(op, "expected a comparison operator");
        }
        const Token& q = expect(Tok::Int, "a non-negative integer");
        return Formula::cardinality(name.text, cmp, parse_int(q));
      }
      case Tok::Ident: {
        if (t.text == "true") return Formula::top();
        if (t.text == "false") return Formula::bottom();
        if (t.text == "forall" || t.text == "exists") fail(t, "misplaced quantifier");
        if (!std::isalpha(static_cast<unsigned char>(t.text[0])) && !options_.allow_reserved)
          fail(t, "names beginning with '_' are reserved: " + t.text);
        std::vector<Term> args;
        if (!accept(Tok::LParen)) return Formula::atom(t.text, {});
        if (!accept(Tok::RParen)) {
          do {
            const Token& a = next();
            if (a.kind == Tok::Int) fail(a, "element constants are not allowed in sentences");
            args.push_back(Term::variable(parse_variable(a)));
          } while (accept(Tok::Comma));
          expect(Tok::RParen, "')'");
        }
        if (args.size() > 2) fail(t, "predicate " + t.text + " has arity above 2");
        return Formula::atom(t.text, std::move(args));
      }
      default:
        fail(t, "unexpected '" + describe(t) + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ParseOptions options_;
};

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Splits off the first whitespace-delimited word; returns the rest and the
// 1-based column where it starts.
std::pair<std::string, std::size_t> rest_after_keyword(const std::string& line, std::size_t keyword_end) {
  std::size_t p = keyword_end;
  while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
  return {line.substr(p), p + 1};
}

BigRational parse_weight(const std::string& text, int line, int col) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw ParseError(line, col, e.what());
  }
}

std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

int parse_domain(const std::vector<std::string>& words, int line) {
  if (words.size() != 2) throw ParseError(line, 1, "expected 'domain <n>'");
  try {
    std::size_t used = 0;
    int n = std::stoi(words[1], &used);
    if (used != words[1].size() || n < 1) throw Error("");
    return n;
  } catch (...) {
    throw ParseError(line, 8, "domain size must be a positive integer");
  }
}

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  return FormulaParser(text, options).parse_all();
}

Problem parse_problem(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = options.line - 1;
  std::optional<int> domain;
  std::vector<Formula> sentences;
  std::vector<Formula> cc;
  struct PendingWeight {
    std::string name;
    WeightPair weights;
    int line;
  };
  std::vector<PendingWeight> pending;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& kw = words[0];
    std::size_t kw_end = line.find(kw) + kw.size();
    if (kw == "domain") {
      if (domain) throw ParseError(line_no, 1, "duplicate domain line");
      domain = parse_domain(words, line_no);
    } else if (kw == "sentence" || kw == "cc") {
      auto [body, col] = rest_after_keyword(line, kw_end);
      if (body.empty()) throw ParseError(line_no, static_cast<int>(col), "missing formula");
      ParseOptions opts = options;
      opts.line = line_no;
      opts.column = static_cast<int>(col);
      Formula f = parse_formula(body, opts);
      if (kw == "sentence") {
        if (unsigned fv = free_variables(f))
          throw ParseError(line_no, static_cast<int>(col),
                           std::string("free variable ") + ((fv & 1) ? "x" : "y") + " in sentence");
        sentences.push_back(f);
      } else {
        if (!only_cardinality(f) || !has_cardinality(f))
          throw ParseError(line_no, static_cast<int>(col),
                           "cc lines may only combine cardinality atoms |P| op q");
        cc.push_back(f);
      }
    } else if (kw == "weight") {
      if (words.size() != 4) throw ParseError(line_no, 1, "expected 'weight <Pred> <w> <wbar>'");
      std::size_t c1 = line.find(words[2], line.find(words[1]) + words[1].size()) + 1;
      WeightPair wp{parse_weight(words[2], line_no, static_cast<int>(c1)),
                    parse_weight(words[3], line_no, static_cast<int>(c1 + words[2].size() + 1))};
      if (wp.positive < 0 || wp.negative < 0)
        throw ParseError(line_no, static_cast<int>(c1), "negative weights are not allowed");
      pending.push_back({words[1], wp, line_no});
    } else {
      throw ParseError(line_no, static_cast<int>(line.find(kw) + 1), "unknown directive '" + kw + "'");
    }
  }
  if (!domain) throw ParseError(line_no + 1, 1, "missing 'domain <n>' line");
  Formula sentence = Formula::conjunction(std::move(sentences));
  Vocabulary vocab = vocabulary_of(sentence);
  Weighting weights;
  for (const auto& w : pending) {
    if (!vocab.contains(w.name))
      throw ParseError(w.line, 8, "weight given for unknown predicate " + w.name);
    weights[w.name] = w.weights;
  }
  for (const auto& f : cc)
    for (const auto& name : cardinality_predicates(f))
      if (!vocab.contains(name)) throw Error("cardinality constraint on unknown predicate " + name);
  return make_problem(sentence, *domain, std::move(weights), Formula::conjunction(std::move(cc)));
}

MlnSpec parse_mln(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  MlnSpec spec;
  bool have_domain = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& kw = words[0];
    std::size_t kw_end = line.find(kw) + kw.size();
    if (kw == "domain") {
      if (have_domain) throw ParseError(line_no, 1, "duplicate domain line");
      spec.domain_size = parse_domain(words, line_no);
      have_domain = true;
      continue;
    }
    auto [body, col] = rest_after_keyword(line, kw_end);
    if (body.empty()) throw ParseError(line_no, static_cast<int>(col), "missing formula");
    MlnFormula mf;
    if (kw != "inf" && kw != "+inf") mf.weight = parse_weight(kw, line_no, static_cast<int>(line.find(kw) + 1));
    ParseOptions opts;
    opts.line = line_no;
    opts.column = static_cast<int>(col);
    mf.formula = parse_formula(body, opts);
    spec.formulas.push_back(mf);
  }
  if (!have_domain) throw ParseError(line_no + 1, 1, "missing 'domain <n>' line");
  return spec;
}

// ---------------------------------------------------------------------------
// Output

std::string format_problem(const Problem& p) {
  std::ostringstream os;
  os << "domain " << p.domain_size << '\n';
  if (!p.sentence.is_top()) os << "sentence " << to_string(p.sentence) << '\n';
  for (const auto& [name, wp] : p.weights)
    if (!(wp == WeightPair{})) os << "weight " << name << ' ' << wp.positive << ' ' << wp.negative << '\n';
  if (!p.cardinality.is_top()) os << "cc " << to_string(p.cardinality) << '\n';
  return os.str();
}

std::string format_mln(const MlnSpec& spec) {
  std::ostringstream os;
  os << "domain " << spec.domain_size << '\n';
  for (const auto& f : spec.formulas) {
    if (f.weight) {
      os << *f.weight;
    } else {
      os << "inf";
    }
    os << ' ' << to_string(f.formula) << '\n';
  }
  return os.str();
}

std::string format_model(const Model& model) {
  std::string out;
  for (const auto& a : model.true_atoms) {
    if (!out.empty()) out += ',';
    out += to_string(a);
  }
  return out;
}

Model parse_model(std::string_view line, const Vocabulary& vocabulary, int domain_size) {
  Model m;
  m.vocabulary = vocabulary;
  m.domain_size = domain_size;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) { throw ParseError(1, static_cast<int>(i + 1), msg); };
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i == line.size()) return m;
  while (true) {
    std::size_t start = i;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    if (i == start) fail("expected predicate name");
    GroundAtom a{std::string(line.substr(start, i - start)), {}};
    if (i >= line.size() || line[i] != '(') fail("expected '('");
    ++i;
    while (i < line.size() && line[i] != ')') {
      std::size_t ds = i;
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (ds == i) fail("expected element index");
      int e = std::stoi(std::string(line.substr(ds, i - ds)));
      if (e < 1 || e > domain_size) fail("element index out of range");
      a.args.push_back(e);
      if (i < line.size() && line[i] == ',') ++i;
    }
    if (i >= line.size()) fail("expected ')'");
    ++i;
    if (!vocabulary.contains(a.predicate)) fail("unknown predicate " + a.predicate);
    if (vocabulary.arity(a.predicate) != static_cast<int>(a.args.size())) fail("arity mismatch for " + a.predicate);
    m.true_atoms.insert(std::move(a));
    if (i >= line.size()) break;
    if (line[i] != ',') fail("expected ','");
    ++i;
  }
  return m;
}

std::string format_model_json(const Model& model, const BigRational* probability) {
  nlohmann::json j;
  j["model"] = nlohmann::json::array();
  for (const auto& a : model.true_atoms) j["model"].push_back(to_string(a));
  if (probability) j["probability"] = probability->get_str();
  return j.dump();
}

std::uint64_t problem_hash(const Problem& problem) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::string text = format_problem(problem);
  for (auto& v : problem.visible) text += "\nvisible " + v;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string stream_header(std::uint64_t seed, const Problem& problem) {
  std::ostringstream os;
  os << "# seed=" << seed << " problem=" << std::hex << std::setw(16) << std::setfill('0')
     << problem_hash(problem);
  return os.str();
}

}  // namespace liftgen
