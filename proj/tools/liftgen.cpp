// liftgen: exact weighted model counting and sampling from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "liftgen/harness.hpp"

using namespace liftgen;

namespace {

enum Exit { kOk = 0, kUsage = 1, kUnsat = 2, kRejected = 3 };

struct Input {
  Problem problem;
  std::optional<MlnSpec> mln;
  std::optional<Preset> preset;
};

std::string read_file(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_mln(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string first;
    if (!(words >> first) || first[0] == '#' || first == "domain") continue;
    return first != "sentence" && first != "weight" && first != "cc";
  }
  return false;
}

Input load(const std::string& path, bool force_mln) {
  Input in;
  std::string text = read_file(path);
  if (force_mln || looks_like_mln(text)) {
    in.mln = parse_mln(text);
    in.problem = mln_to_wfoms(*in.mln).transformed;
  } else {
    in.problem = parse_problem(text);
  }
  return in;
}

void add_cc(Problem& p, const std::vector<std::string>& cc) {
  std::vector<Formula> parts{p.cardinality};
  for (const auto& c : cc) {
    Formula f = parse_formula(c);
    for (const auto& pred : cardinality_predicates(f))
      if (!p.vocabulary.contains(pred)) throw Error("cardinality constraint on unknown predicate " + pred);
    parts.push_back(f);
  }
  p.cardinality = simplify(Formula::conjunction(parts));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact weighted model counting and sampling for two-variable logic"};
  app.require_subcommand(1);

  std::string file;
  bool force_mln = false;
  std::vector<std::string> cc;

  auto* count = app.add_subcommand("count", "Exact weighted model count");
  count->add_option("file", file, "Problem or MLN file ('-' for stdin)")->required();
  count->add_option("--cc", cc, "Extra cardinality constraint such as '|E| = 4'");
  count->add_flag("--mln", force_mln, "Read the file as an MLN");
  bool also_brute = false;
  count->add_flag("--brute", also_brute, "Also enumerate models and print the ground count");

  long num = 1;
  std::uint64_t seed = 0;
  std::string format = "lines";
  int threads = 0;
  auto* sample = app.add_subcommand("sample", "Draw models exactly from the weighted distribution");
  sample->add_option("file", file, "Problem or MLN file ('-' for stdin)")->required();
  sample->add_option("--num", num, "Number of models")->check(CLI::NonNegativeNumber);
  sample->add_option("--seed", seed, "Master seed");
  sample->add_option("--format", format, "lines or json")->check(CLI::IsMember({"lines", "json"}));
  sample->add_option("--threads", threads, "Worker threads (0 = all, capped by LIFTGEN_THREADS)");
  sample->add_option("--cc", cc, "Extra cardinality constraint");
  sample->add_flag("--mln", force_mln, "Read the file as an MLN");

  std::string preset_name;
  int n = 5;
  int k = 2;
  bool emit = false;
  auto* preset = app.add_subcommand("preset", "Built-in problems");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_option("-n", n, "Domain size")->check(CLI::PositiveNumber);
  preset->add_option("-k", k, "Degree for k-regular")->check(CLI::NonNegativeNumber);
  preset->add_flag("--emit-problem", emit, "Print the problem in input syntax");

  std::string target;
  double alpha = 0.05;
  std::string mode = "auto";
  std::string predicates;
  long validate_num = 100000;
  int max_atoms = 30;
  auto* validate_cmd = app.add_subcommand("validate", "Sample and run a KS test against the exact distribution");
  validate_cmd->add_option("target", target, "Problem file or preset name")->required();
  validate_cmd->add_option("--num", validate_num, "Number of samples")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  validate_cmd->add_option("--mode", mode, "model, count or auto")->check(CLI::IsMember({"auto", "model", "count"}));
  validate_cmd->add_option("--predicates", predicates, "Comma-separated predicates for count mode");
  validate_cmd->add_option("--seed", seed, "Master seed");
  validate_cmd->add_option("--threads", threads, "Worker threads");
  validate_cmd->add_option("-n", n, "Domain size for presets")->check(CLI::PositiveNumber);
  validate_cmd->add_option("-k", k, "Degree for k-regular")->check(CLI::NonNegativeNumber);
  validate_cmd->add_option("--max-atoms", max_atoms, "Ground atom cap of the brute-force reference");
  validate_cmd->add_flag("--mln", force_mln, "Read the file as an MLN");

  auto* oracle = app.add_subcommand("oracle", "Brute-force count and exact distribution");
  oracle->add_option("file", file, "Problem or MLN file ('-' for stdin)")->required();
  oracle->add_option("--max-atoms", max_atoms, "Ground atom cap");
  oracle->add_flag("--mln", force_mln, "Read the file as an MLN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (count->parsed()) {
      Input in = load(file, force_mln);
      add_cc(in.problem, cc);
      BigRational c = wfomc(in.problem);
      std::cout << "wfomc " << to_string(c) << "\n";
      if (also_brute) {
        BruteOptions opts;
        opts.max_atoms = max_atoms;
        std::cout << "brute " << to_string(brute_wfomc(in.problem, opts)) << "\n";
      }
      return c == 0 ? kUnsat : kOk;
    }

    if (sample->parsed()) {
      Input in = load(file, force_mln);
      add_cc(in.problem, cc);
      Sampler sampler(in.problem);
      std::vector<std::string> lines(static_cast<std::size_t>(num));
      const BigRational multiplicity = sampler.problem().multiplicity;
      const bool json = format == "json";
      for_each_sample(
          sampler, seed, num, resolve_threads(threads),
          [&](long i, const Structure& s, const BigRational* p) {
            Model m = sampler.to_model(s, true);
            if (json) {
              BigRational prob = *p * multiplicity;
              prob.canonicalize();
              lines[static_cast<std::size_t>(i)] = format_model_json(m, &prob);
            } else {
              lines[static_cast<std::size_t>(i)] = format_model(m);
            }
          },
          json);
      std::cout << stream_header(seed, in.problem) << "\n";
      for (const auto& l : lines) std::cout << l << "\n";
      return kOk;
    }

    if (preset->parsed()) {
      Preset p = make_preset(preset_name, n, k);
      for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";
      if (emit) {
        std::cout << (p.mln ? format_mln(*p.mln) : format_problem(p.problem));
        return kOk;
      }
      BigRational c = wfomc(p.problem);
      std::cout << "preset " << p.name << " n=" << n << "\nwfomc " << to_string(c) << "\n";
      return c == 0 ? kUnsat : kOk;
    }

    if (validate_cmd->parsed()) {
      Input in;
      const auto& names = preset_names();
      if (std::find(names.begin(), names.end(), target) != names.end()) {
        in.preset = make_preset(target, n, k);
        for (const auto& w : in.preset->warnings) std::cerr << "warning: " << w << "\n";
        in.problem = in.preset->problem;
        in.mln = in.preset->mln;
      } else {
        in = load(target, force_mln);
      }
      ValidateOptions opts;
      opts.samples = validate_num;
      opts.alpha = alpha;
      opts.seed = seed;
      opts.threads = threads;
      opts.brute.max_atoms = max_atoms;
      opts.predicates = split_list(predicates);
      if (opts.predicates.empty() && in.preset) opts.predicates = in.preset->tested;
      if (mode == "count" || (mode == "auto" && in.mln)) {
        opts.mode = ValidateMode::Count;
        if (opts.predicates.empty()) opts.predicates = in.problem.output_predicates();
      } else {
        opts.mode = ValidateMode::Model;
      }
      ValidateReport r = validate(in.problem, opts);
      std::cout << "mode " << (opts.mode == ValidateMode::Model ? "model" : "count") << "\n"
                << "samples " << r.ks.n_samples << "\n"
                << "dimension " << r.ks.k << "\n"
                << "outcomes " << r.distinct_outcomes << " observed, " << r.reference_outcomes << " possible\n"
                << "max_deviation " << r.ks.max_deviation << "\n"
                << "dkw_bound " << r.ks.dkw_bound << "\n"
                << "result " << (r.ks.rejected ? "REJECTED" : "not rejected") << " at alpha " << r.ks.alpha << "\n";
      return r.ks.rejected ? kRejected : kOk;
    }

    if (oracle->parsed()) {
      Input in = load(file, force_mln);
      BruteOptions opts;
      opts.max_atoms = max_atoms;
      const BigRational total = brute_wfomc(in.problem, opts);
      std::cout << "count " << to_string(total) << "\n";
      if (total == 0) return kUnsat;
      const auto visible = in.problem.output_predicates();
      std::map<Model, BigRational> dist;
      for (const auto& [m, w] : exact_distribution(in.problem, opts)) dist[m.restricted_to(visible)] += w;
      for (const auto& [m, w] : dist) std::cout << to_string(w) << " " << format_model(m) << "\n";
      return kOk;
    }
  } catch (const NoModels& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnsat;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
