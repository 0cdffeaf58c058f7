#include "liftgen/sampler.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace liftgen {

namespace {
// Larger step distributions are rebuilt on every visit instead of kept.
constexpr std::size_t kMaxCachedOutcomes = 1 << 16;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw Error("uniform_below: empty range");
  // Reject the top partial copy of [0, bound) to keep the draw exact.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    std::uint64_t r = engine_();
    if (r < limit) return r % bound;
  }
}

BigInt RandomSource::uniform_below(const BigInt& bound) {
  if (bound <= 0) throw Error("uniform_below: empty range");
  if (bound.fits_ulong_p()) {
    BigInt r;
    mpz_set_ui(r.get_mpz_t(), uniform_below(static_cast<std::uint64_t>(bound.get_ui())));
    return r;
  }
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buf(words);
  BigInt r;
  while (true) {
    for (auto& w : buf) w = engine_();
    const std::size_t extra = words * 64 - bits;
    if (extra) buf[words - 1] >>= extra;
    mpz_import(r.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
    if (r < bound) return r;
  }
}

std::size_t sample_cumulative(const std::vector<BigInt>& cumulative, RandomSource& rng) {
  if (cumulative.empty() || cumulative.back() <= 0) throw Error("no valid choice");
  BigInt r = rng.uniform_below(cumulative.back());
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  return static_cast<std::size_t>(it - cumulative.begin());
}

std::size_t sample_discrete(const std::vector<BigInt>& weights, RandomSource& rng) {
  std::vector<BigInt> cumulative;
  cumulative.reserve(weights.size());
  BigInt sum = 0;
  for (const auto& w : weights) {
    if (w < 0) throw Error("negative weight in discrete distribution");
    sum += w;
    cumulative.push_back(sum);
  }
  return sample_cumulative(cumulative, rng);
}

std::size_t sample_discrete(const std::vector<BigRational>& weights, RandomSource& rng) {
  BigInt d = 1;
  for (const auto& w : weights) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), w.get_den_mpz_t());
  std::vector<BigInt> scaled;
  scaled.reserve(weights.size());
  for (const auto& w : weights) scaled.push_back(BigInt(w.get_num() * (d / w.get_den())));
  return sample_discrete(scaled, rng);
}

void shuffle(std::vector<int>& items, RandomSource& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.uniform_below(static_cast<std::uint64_t>(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::vector<std::vector<int>> random_partition(std::vector<int> items, const Configuration& config,
                                               RandomSource& rng) {
  long total = 0;
  for (int c : config) {
    if (c < 0) throw Error("random_partition: negative block size");
    total += c;
  }
  if (total != static_cast<long>(items.size())) throw Error("random_partition: sizes do not match the items");
  shuffle(items, rng);
  std::vector<std::vector<int>> out;
  std::size_t pos = 0;
  for (int c : config) {
    out.emplace_back(items.begin() + static_cast<long>(pos), items.begin() + static_cast<long>(pos + c));
    pos += c;
  }
  return out;
}

std::uint32_t swap_table(std::uint32_t bits, int num_binary) {
  std::uint32_t out = 0;
  for (int r = 0; r < num_binary; ++r) {
    out |= ((bits >> (2 * r)) & 1u) << (2 * r + 1);
    out |= ((bits >> (2 * r + 1)) & 1u) << (2 * r);
  }
  return out;
}

std::uint32_t Structure::table(int i, int j, int n) const {
  return tables[static_cast<std::size_t>(i) * n + j];
}

// Running product of the probabilities of every random choice.
struct Sampler::Trace {
  bool on = false;
  BigInt num = 1, den = 1;
  void choice(const BigInt& w, const BigInt& total) {
    if (!on) return;
    num *= w;
    den *= total;
  }
  void uniform(const BigInt& ways) {
    if (on) den *= ways;
  }
};

Sampler::Sampler(const Problem& problem, SamplerOptions options)
    : engine_(std::make_unique<CountingEngine>(compile(problem))) {
  init(options);
}

Sampler::Sampler(LiftedProblem problem, SamplerOptions options)
    : engine_(std::make_unique<CountingEngine>(std::move(problem))) {
  init(options);
}

void Sampler::init(SamplerOptions options) {
  options_ = options;
  const auto& eng = *engine_;
  BigInt sum = 0;
  for (int a = 0; a < eng.num_contexts(); ++a) {
    BigInt w = eng.context(a).weight == 0 ? BigInt(0) : BigInt(eng.context(a).weight * eng.context_total(a));
    if (w < 0) throw Error("internal error: negative model count");
    context_weights_.push_back(w);
    sum += w;
    context_cumulative_.push_back(sum);
  }
  if (sum == 0) throw NoModels("sentence has no models over this domain");
  count_ = BigRational(sum, eng.scale()) / eng.problem().multiplicity;
  count_.canonicalize();

  const auto& lp = eng.problem();
  const auto& layout = eng.layout();
  Vocabulary visible;
  for (const auto& p : lp.visible) visible.add(p, lp.vocabulary.arity(p));
  visible_atoms_ = ground_atoms(visible, lp.domain_size);
  for (const auto& atom : visible_atoms_) {
    Source src{Source::Nullary, 0, 0, 0};
    const int ar = static_cast<int>(atom.args.size());
    if (ar == 0) {
      auto it = std::find(layout.nullary.begin(), layout.nullary.end(), atom.predicate);
      src.kind = Source::Nullary;
      src.bit = static_cast<int>(it - layout.nullary.begin());
    } else if (ar == 1 || atom.args[0] == atom.args[1]) {
      src.kind = Source::OneAtom;
      src.bit = layout.one_index.at(atom.predicate);
      src.i = atom.args[0] - 1;
    } else {
      src.kind = Source::Table;
      src.bit = layout.binary_index.at(atom.predicate);
      src.i = atom.args[0] - 1;
      src.j = atom.args[1] - 1;
    }
    visible_sources_.push_back(src);
  }
}

std::vector<long> Sampler::clamp(std::vector<long> offset) const {
  const auto& space = engine_->space();
  for (int v = 0; v < space.size(); ++v) offset[v] = std::min<long>(offset[v], space.cap(v));
  return offset;
}

const std::vector<std::pair<Configuration, BigInt>>& Sampler::one_type_distribution(int a) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = one_types_.find(a);
    if (it != one_types_.end()) return it->second;
  }
  const auto& ctx = engine_->context(a);
  std::vector<std::pair<Configuration, BigInt>> dist;
  std::vector<BigInt> cumulative;
  BigInt sum = 0;
  const int types = static_cast<int>(ctx.types.size());
  if (types > 0) {
    for (const auto& m : config_space(domain_size(), types)) {
      std::vector<Cell> cells;
      for (int i = 0; i < types; ++i)
        if (m[i] > 0) cells.push_back(Cell{i, ctx.types[i].initial_block, m[i]});
      BigInt w = engine_->conditioned(a, cells, ctx.offset);
      if (w == 0) continue;
      w *= multinomial(m);
      sum += w;
      dist.emplace_back(m, w);
      cumulative.push_back(sum);
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  one_type_cumulative_.emplace(a, std::move(cumulative));
  return one_types_.emplace(a, std::move(dist)).first->second;
}

bool Sampler::ex_sat(int a, int t_type, std::uint32_t t_block, const std::vector<Cell>& others,
                     const std::vector<std::vector<int>>& g, const std::vector<long>& offset) const {
  const auto& eng = *engine_;
  const auto& ctx = eng.context(a);
  const auto& layout = eng.layout();
  const auto& space = eng.space();
  if (g.size() != others.size()) return false;
  const std::size_t all_tables = std::size_t{1} << (2 * layout.num_binary());
  std::uint32_t discharged = 0;
  std::vector<long> counts = offset;
  const auto& tt = ctx.types[t_type];
  for (int v = 0; v < space.size(); ++v) counts[v] += space.get(tt.key, v);
  for (std::size_t c = 0; c < others.size(); ++c) {
    if (g[c].size() != all_tables) return false;
    long total = 0;
    const auto& coherent = eng.tables(a, t_type, others[c].type);
    for (std::size_t p = 0; p < all_tables; ++p) {
      if (g[c][p] == 0) continue;
      if (g[c][p] < 0) return false;
      total += g[c][p];
      auto it = std::find_if(coherent.begin(), coherent.end(),
                             [&](const auto& info) { return info.table.bits == p; });
      if (it == coherent.end()) return false;  // incoherent table
      discharged |= it->forward;
      for (int v = 0; v < space.size(); ++v) counts[v] += static_cast<long>(g[c][p]) * space.get(it->key, v);
    }
    if (total != others[c].count) return false;
  }
  if ((t_block & tt.initial_block) & ~discharged) return false;
  return eng.constraint().feasible(counts);
}

StepDistribution Sampler::step_distribution(int a, int t_type, std::uint32_t t_block, std::vector<Cell> others,
                                            const std::vector<long>& offset) const {
  const auto& eng = *engine_;
  const auto& ctx = eng.context(a);
  const auto& space = eng.space();
  std::sort(others.begin(), others.end());
  StepDistribution dist;
  dist.cells = others;
  for (const auto& c : others) dist.tables.push_back(&eng.tables(a, t_type, c.type));
  const std::uint32_t need = t_block & ctx.types[t_type].initial_block;

  std::vector<long> base = offset;
  for (int v = 0; v < space.size(); ++v) base[v] += space.get(ctx.types[t_type].key, v);

  std::vector<int> config;
  std::map<std::pair<int, std::uint32_t>, int> reduced;
  BigInt sum = 0;
  // Depth-first over cells, then over the tables of each cell.
  std::function<void(std::size_t, std::size_t, int, const BigInt&, std::uint32_t, std::vector<long>&)> go =
      [&](std::size_t c, std::size_t p, int remaining, const BigInt& factor, std::uint32_t discharged,
          std::vector<long>& counts) {
        if (c == others.size()) {
          if (need & ~discharged) return;
          std::vector<long> next = clamp(counts);
          if (!eng.constraint().feasible(next)) return;
          std::vector<Cell> cells;
          for (const auto& [k, cnt] : reduced)
            if (cnt > 0) cells.push_back(Cell{k.first, k.second, cnt});
          BigInt w = eng.symbolic() ? eng.conditioned(a, cells, next) : eng.conditioned(a, cells, {});
          w *= factor;
          if (w == 0) return;
          sum += w;
          dist.outcomes.push_back(config);
          dist.cumulative.push_back(sum);
          return;
        }
        const auto& tables = *dist.tables[c];
        if (p == 0) remaining = others[c].count;
        if (p == tables.size()) {
          if (remaining == 0) go(c + 1, 0, 0, factor, discharged, counts);
          return;
        }
        const auto& info = tables[p];
        const bool last = p + 1 == tables.size();
        const std::pair<int, std::uint32_t> cell{others[c].type, others[c].block & ~info.backward};
        for (int k = last ? remaining : 0; k <= remaining; ++k) {
          BigInt f = factor;
          if (k > 0) {
            BigInt wp;
            mpz_pow_ui(wp.get_mpz_t(), info.weight.get_mpz_t(), static_cast<unsigned long>(k));
            f *= wp;
            f *= binomial(static_cast<unsigned>(remaining), static_cast<unsigned>(k));
            if (f == 0) break;
            for (int v = 0; v < space.size(); ++v) counts[v] += static_cast<long>(k) * space.get(info.key, v);
            reduced[cell] += k;
          }
          config.push_back(k);
          go(c, p + 1, remaining - k, f, k > 0 ? discharged | info.forward : discharged, counts);
          config.pop_back();
          if (k > 0) {
            for (int v = 0; v < space.size(); ++v) counts[v] -= static_cast<long>(k) * space.get(info.key, v);
            reduced[cell] -= k;
          }
        }
      };
  if (others.empty()) {
    dist.outcomes.emplace_back();
    dist.cumulative.push_back(1);
    return dist;
  }
  go(0, 0, 0, BigInt(1), 0, base);
  if (dist.cumulative.empty()) throw Error("internal error: no feasible 2-table configuration");
  return dist;
}

std::shared_ptr<const StepDistribution> Sampler::cached_step(int a, int t_type, std::uint32_t t_block,
                                                             const std::vector<Cell>& others,
                                                             const std::vector<long>& offset) const {
  std::vector<long> key{a, t_type, static_cast<long>(t_block)};
  for (const auto& c : others) {
    key.push_back(c.type);
    key.push_back(static_cast<long>(c.block));
    key.push_back(c.count);
  }
  key.push_back(-1);
  if (engine_->symbolic()) key.insert(key.end(), offset.begin(), offset.end());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = steps_.find(key);
    if (it != steps_.end()) return it->second;
  }
  auto dist = std::make_shared<const StepDistribution>(step_distribution(a, t_type, t_block, others, offset));
  if (dist->outcomes.size() > kMaxCachedOutcomes) return dist;
  std::lock_guard<std::mutex> lock(mu_);
  return steps_.emplace(std::move(key), std::move(dist)).first->second;
}

void Sampler::sample_ufo2(int a, const std::vector<int>& remaining, Structure& s, Trace& trace,
                          RandomSource& rng) const {
  const int n = domain_size();
  for (std::size_t x = 0; x < remaining.size(); ++x) {
    for (std::size_t y = x + 1; y < remaining.size(); ++y) {
      const int i = remaining[x], j = remaining[y];
      const auto& tables = engine_->tables(a, s.types[i], s.types[j]);
      std::vector<BigInt> cumulative;
      BigInt sum = 0;
      for (const auto& t : tables) {
        sum += t.weight;
        cumulative.push_back(sum);
      }
      if (sum == 0) throw Error("internal error: no coherent 2-table for a sampled pair");
      const std::size_t k = sample_cumulative(cumulative, rng);
      trace.choice(tables[k].weight, sum);
      s.tables[static_cast<std::size_t>(i) * n + j] = tables[k].table.bits;
    }
  }
}

Structure Sampler::sample_structure(RandomSource& rng, BigRational* probability) const {
  const auto& eng = *engine_;
  const int n = domain_size();
  Trace trace;
  trace.on = probability != nullptr;
  Structure s;
  s.types.assign(n, 0);
  s.tables.assign(static_cast<std::size_t>(n) * n, 0);

  const std::size_t a = sample_cumulative(context_cumulative_, rng);
  trace.choice(context_weights_[a], context_cumulative_.back());
  s.context = static_cast<int>(a);
  const auto& ctx = eng.context(s.context);

  const auto& dist = one_type_distribution(s.context);
  std::vector<BigInt> const* cumulative;
  {
    std::lock_guard<std::mutex> lock(mu_);
    cumulative = &one_type_cumulative_.at(s.context);
  }
  const std::size_t m = sample_cumulative(*cumulative, rng);
  trace.choice(dist[m].second, cumulative->back());
  const Configuration& config = dist[m].first;
  trace.uniform(multinomial(config));
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  auto parts = random_partition(all, config, rng);
  std::vector<std::uint32_t> block(n, 0);
  for (std::size_t t = 0; t < parts.size(); ++t)
    for (int e : parts[t]) {
      s.types[e] = static_cast<int>(t);
      block[e] = ctx.types[t].initial_block;
    }

  std::vector<int> remaining = all;
  std::vector<long> offset = ctx.offset;
  const auto& space = eng.space();
  while (remaining.size() > 1) {
    const bool any_block = std::any_of(remaining.begin(), remaining.end(), [&](int e) { return block[e] != 0; });
    if (!any_block && !eng.symbolic()) {
      sample_ufo2(s.context, remaining, s, trace, rng);
      break;
    }
    std::size_t pick = 0;
    if (!options_.index_order) {
      int best = -1;
      for (std::size_t r = 0; r < remaining.size(); ++r) {
        const int size = __builtin_popcount(block[remaining[r]]);
        if (size > best) {
          best = size;
          pick = r;
        }
      }
    }
    const int t = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<long>(pick));

    std::map<std::pair<int, std::uint32_t>, std::vector<int>> groups;
    for (int e : remaining) groups[{s.types[e], block[e]}].push_back(e);
    std::vector<Cell> others;
    for (const auto& [k, members] : groups) others.push_back(Cell{k.first, k.second, static_cast<int>(members.size())});

    auto step = cached_step(s.context, s.types[t], block[t], others, offset);
    const std::size_t choice = sample_cumulative(step->cumulative, rng);
    trace.choice(step->weight(choice), step->total());
    const auto& g = step->outcomes[choice];

    for (int v = 0; v < space.size(); ++v) offset[v] += space.get(ctx.types[s.types[t]].key, v);
    std::size_t pos = 0;
    std::size_t c = 0;
    for (const auto& [k, members] : groups) {
      const auto& tables = *step->tables[c];
      Configuration part(g.begin() + static_cast<long>(pos), g.begin() + static_cast<long>(pos + tables.size()));
      pos += tables.size();
      ++c;
      trace.uniform(multinomial(part));
      auto chunks = random_partition(members, part, rng);
      for (std::size_t p = 0; p < chunks.size(); ++p) {
        const auto& info = tables[p];
        for (int e : chunks[p]) {
          if (t < e) {
            s.tables[static_cast<std::size_t>(t) * n + e] = info.table.bits;
          } else {
            s.tables[static_cast<std::size_t>(e) * n + t] = swap_table(info.table.bits, eng.layout().num_binary());
          }
          block[e] &= ~info.backward;
          for (int v = 0; v < space.size(); ++v) offset[v] += space.get(info.key, v);
        }
      }
    }
    offset = clamp(offset);
  }

  if (probability) {
    *probability = BigRational(trace.num, trace.den);
    probability->canonicalize();
  }
  return s;
}

bool Sampler::atom_value(const Structure& s, const std::string& predicate, const std::vector<int>& args) const {
  const auto& layout = engine_->layout();
  const auto& ctx = engine_->context(s.context);
  const int n = domain_size();
  if (args.empty()) {
    auto it = std::find(layout.nullary.begin(), layout.nullary.end(), predicate);
    if (it == layout.nullary.end()) throw Error("unknown predicate " + predicate);
    return (ctx.nullary >> (it - layout.nullary.begin())) & 1;
  }
  const int i = args[0] - 1;
  if (args.size() == 1 || args[0] == args[1]) {
    return (ctx.types[s.types[i]].type.bits >> layout.one_index.at(predicate)) & 1;
  }
  const int j = args[1] - 1;
  const int r = layout.binary_index.at(predicate);
  if (i < j) return (s.tables[static_cast<std::size_t>(i) * n + j] >> (2 * r)) & 1;
  return (s.tables[static_cast<std::size_t>(j) * n + i] >> (2 * r + 1)) & 1;
}

Model Sampler::to_model(const Structure& s, bool visible_only) const {
  const auto& lp = engine_->problem();
  Vocabulary vocab;
  for (const auto& p : visible_only ? lp.visible : lp.original) vocab.add(p, lp.vocabulary.arity(p));
  Model m;
  m.vocabulary = vocab;
  m.domain_size = lp.domain_size;
  for (const auto& atom : ground_atoms(vocab, lp.domain_size))
    if (atom_value(s, atom.predicate, atom.args)) m.true_atoms.insert(atom);
  return m;
}

std::string Sampler::model_key(const Structure& s) const {
  const auto& ctx = engine_->context(s.context);
  const int n = domain_size();
  std::string key(visible_sources_.size(), '0');
  for (std::size_t k = 0; k < visible_sources_.size(); ++k) {
    const Source& src = visible_sources_[k];
    bool v = false;
    switch (src.kind) {
      case Source::Nullary: v = (ctx.nullary >> src.bit) & 1; break;
      case Source::OneAtom: v = (ctx.types[s.types[src.i]].type.bits >> src.bit) & 1; break;
      case Source::Table:
        v = src.i < src.j ? (s.tables[static_cast<std::size_t>(src.i) * n + src.j] >> (2 * src.bit)) & 1
                          : (s.tables[static_cast<std::size_t>(src.j) * n + src.i] >> (2 * src.bit + 1)) & 1;
        break;
    }
    if (v) key[k] = '1';
  }
  return key;
}

std::vector<long> Sampler::count_vector(const Structure& s, const std::vector<std::string>& predicates) const {
  const auto& lp = engine_->problem();
  const auto& layout = engine_->layout();
  const auto& ctx = engine_->context(s.context);
  const int n = domain_size();
  std::vector<long> out;
  for (const auto& p : predicates) {
    const int ar = lp.vocabulary.arity(p);
    long count = 0;
    if (ar == 0) {
      count = atom_value(s, p, {});
    } else {
      const int bit = layout.one_index.at(p);
      for (int i = 0; i < n; ++i) count += (ctx.types[s.types[i]].type.bits >> bit) & 1;
      if (ar == 2) {
        const int r = layout.binary_index.at(p);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            const std::uint32_t t = s.tables[static_cast<std::size_t>(i) * n + j];
            count += ((t >> (2 * r)) & 1) + ((t >> (2 * r + 1)) & 1);
          }
      }
    }
    out.push_back(count);
  }
  return out;
}

SampleResult Sampler::sample(RandomSource& rng) const {
  BigRational p;
  Structure s = sample_structure(rng, &p);
  SampleResult out;
  out.model = to_model(s, true);
  out.full = to_model(s, false);
  out.probability = p * engine_->problem().multiplicity;
  out.probability.canonicalize();
  return out;
}

SampleResult sample_model(const Problem& problem, RandomSource& rng) {
  Sampler sampler(problem);
  return sampler.sample(rng);
}

}  // namespace liftgen
