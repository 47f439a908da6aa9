#include "core/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "core/convexity.hpp"
#include "core/functionals.hpp"
#include "core/inequalities.hpp"
#include "core/norms.hpp"
#include "core/parallel.hpp"
#include "core/sampling.hpp"

namespace tracecvx {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::kSchema, what); }

// Typed access to optional config fields.
class Config {
 public:
  explicit Config(const Json& j) : j_(j) {
    if (!j.is_object()) schema("campaign config must be a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_[key].is_null(); }

  double number(const char* key, double def) const {
    if (!has(key)) return def;
    if (!j_[key].is_number()) schema(std::string("\"") + key + "\" must be a number");
    return j_[key].get<double>();
  }

  double required_number(const char* key) const {
    if (!has(key)) schema(std::string("missing \"") + key + "\"");
    return number(key, 0.0);
  }

  long long integer(const char* key, long long def) const {
    if (!has(key)) return def;
    if (!j_[key].is_number_integer()) schema(std::string("\"") + key + "\" must be an integer");
    return j_[key].get<long long>();
  }

  std::uint64_t seed() const {
    if (!has("seed")) return 0;
    const Json& s = j_["seed"];
    if (s.is_number_unsigned()) return s.get<std::uint64_t>();
    if (s.is_number_integer() && s.get<long long>() >= 0) {
      return static_cast<std::uint64_t>(s.get<long long>());
    }
    schema("\"seed\" must be a nonnegative integer");
  }

  bool flag(const char* key) const {
    if (!has(key)) return false;
    if (!j_[key].is_boolean()) schema(std::string("\"") + key + "\" must be a boolean");
    return j_[key].get<bool>();
  }

  std::string string(const char* key, const std::string& def) const {
    if (!has(key)) return def;
    if (!j_[key].is_string()) schema(std::string("\"") + key + "\" must be a string");
    return j_[key].get<std::string>();
  }

  /// "dims" as a list, or "dim" as a single entry, or the default.
  std::vector<Index> dims(std::vector<Index> def) const {
    if (has("dims")) {
      const Json& d = j_["dims"];
      if (!d.is_array() || d.empty()) schema("\"dims\" must be a nonempty array");
      std::vector<Index> out;
      for (const Json& e : d) {
        if (!e.is_number_integer() || e.get<long long>() < 1) {
          schema("\"dims\" entries must be positive integers");
        }
        out.push_back(static_cast<Index>(e.get<long long>()));
      }
      return out;
    }
    if (has("dim")) {
      const long long n = integer("dim", 0);
      if (n < 1) schema("\"dim\" must be positive");
      return {static_cast<Index>(n)};
    }
    return def;
  }

  std::vector<double> numbers(const char* key, std::vector<double> def) const {
    if (!has(key)) return def;
    const Json& a = j_[key];
    if (!a.is_array()) schema(std::string("\"") + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const Json& e : a) {
      if (!e.is_number()) schema(std::string("\"") + key + "\" must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  int trials(int def) const {
    const long long t = integer("trials", def);
    if (t < 1) schema("\"trials\" must be >= 1");
    return static_cast<int>(t);
  }

  int jobs() const {
    const long long j = integer("jobs", 1);
    if (j < 1) schema("\"jobs\" must be >= 1");
    return static_cast<int>(j);
  }

  /// Tolerance with the "strict" halving applied.
  double tolerance(const char* key, double def) const {
    const double t = number(key, def);
    return flag("strict") ? 0.5 * t : t;
  }

 private:
  const Json& j_;
};

struct Emitter {
  const LineSink& sink;
  CampaignResult result;

  void operator()(const Json& line) {
    sink(line.dump());
    ++result.lines;
  }
};

Json dims_json(const std::vector<Index>& dims) {
  Json a = Json::array();
  for (Index d : dims) a.push_back(d);
  return a;
}

Index product(const std::vector<Index>& dims) {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

LabeledMatrix random_labeled_psd(Rng& rng, const TensorSpace& space) {
  return LabeledMatrix(space, wishart(rng, space.total_dim()).hermitian());
}

LabeledMatrix random_labeled_state(Rng& rng, const TensorSpace& space) {
  return LabeledMatrix(space, random_density_matrix(rng, space.total_dim()).hermitian());
}

// Runs `trial(i)` for every trial, possibly concurrently, and emits the lines
// in trial order.
template <class Fn>
std::vector<Json> run_trials(int trials, int jobs, Fn&& trial) {
  std::vector<Json> lines(static_cast<size_t>(trials));
  parallel_for(lines.size(), jobs, [&](size_t i) { lines[i] = trial(static_cast<std::uint64_t>(i)); });
  return lines;
}

CampaignResult run_certify(const Config& c, const LineSink& sink) {
  const std::string name = c.string("functional", "");
  const auto id = parse_functional(name);
  if (!id) schema("unknown functional \"" + name + "\"");
  CertifyOptions o;
  o.functional = *id;
  o.p = c.required_number("p");
  o.q = c.required_number("q");
  const ExponentPair exps(o.p, o.q);
  o.dims = c.dims(*id == FunctionalId::kPsi ? std::vector<Index>{2, 2} : std::vector<Index>{2});
  o.m = static_cast<int>(c.integer("m", 2));
  o.trials = c.trials(200);
  o.seed = c.seed();
  o.rel_tol = c.tolerance("rel_tol", kGapRelTol);
  o.jobs = c.jobs();

  const Regime regime = claimed_regime(o.functional, exps);
  Emitter emit{sink, {}};
  emit({{"command", "certify"},
        {"functional", functional_name(o.functional)},
        {"p", o.p},
        {"q", o.q},
        {"regime", regime_name(regime)},
        {"mode", regime == Regime::kNeither ? "report-only" : "check"}});

  const std::vector<GapReport> reports = certify_regime(o);
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = -min_gap;
  for (const GapReport& r : reports) {
    Json line = {{"functional", functional_name(r.functional)},
                 {"p", r.p},
                 {"q", r.q},
                 {"dim", product(r.dims)},
                 {"dims", dims_json(r.dims)}};
    if (r.functional == FunctionalId::kPhi) line["m"] = r.m;
    line["trial"] = r.trial;
    line["seed"] = r.seed;
    line["gap"] = r.gap;
    line["scale"] = r.scale;
    line["verdict"] = verdict_name(r.verdict);
    emit(line);
    min_gap = std::min(min_gap, r.gap);
    max_gap = std::max(max_gap, r.gap);
  }
  emit.result.violations = count_violations(reports);
  emit({{"summary", true},
        {"command", "certify"},
        {"functional", functional_name(o.functional)},
        {"regime", regime_name(regime)},
        {"trials", o.trials},
        {"violations", emit.result.violations},
        {"min_gap", min_gap},
        {"max_gap", max_gap}});
  return emit.result;
}

CampaignResult run_minkowski(const Config& c, const LineSink& sink) {
  const ExponentPair exps(c.required_number("p"), c.required_number("q"));
  const std::vector<Index> dims = c.dims({2, 2, 2});
  if (dims.size() != 2 && dims.size() != 3) schema("minkowski needs 2 or 3 dims");
  const TensorSpace space(dims);
  const int trials = c.trials(200);
  const std::uint64_t seed = c.seed();
  const double rel_tol = c.tolerance("rel_tol", 1e-9);

  const std::vector<Json> lines = run_trials(trials, c.jobs(), [&](std::uint64_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(s);
    const LabeledMatrix a = random_labeled_psd(rng, space);
    const MinkowskiVerdict v = dims.size() == 3 ? minkowski_sides(a, exps)
                                                : minkowski_two_space(a, exps);
    const bool ok = v.holds(rel_tol);
    return Json{{"trial", i},
                {"seed", s},
                {"p", v.p},
                {"q", v.q},
                {"lhs", v.lhs},
                {"rhs", v.rhs},
                {"direction", direction_name(v.direction)},
                {"margin", v.margin},
                {"scale", v.scale()},
                {"verdict", v.direction == Direction::kUnchecked ? "UNCHECKED"
                            : ok                                 ? "OK"
                                                                 : "VIOLATION"}};
  });
  Emitter emit{sink, {}};
  double min_rel = std::numeric_limits<double>::infinity();
  for (const Json& l : lines) {
    emit(l);
    if (l["verdict"] == "VIOLATION") ++emit.result.violations;
    const double sc = l["scale"].get<double>();
    if (sc > 0.0) min_rel = std::min(min_rel, l["margin"].get<double>() / sc);
  }
  emit({{"summary", true},
        {"command", "minkowski"},
        {"p", exps.p()},
        {"q", exps.q()},
        {"direction", direction_name(minkowski_direction(exps))},
        {"trials", trials},
        {"violations", emit.result.violations},
        {"min_relative_margin", min_rel}});
  return emit.result;
}

CampaignResult run_ssa(const Config& c, const LineSink& sink) {
  const std::vector<Index> dims = c.dims({2, 2, 2});
  if (dims.size() != 3) schema("ssa needs 3 dims");
  const TensorSpace space(dims);
  const int trials = c.trials(500);
  const std::uint64_t seed = c.seed();
  const double tol = c.tolerance("tol", 1e-9);
  const bool bits = c.flag("bits");
  const double unit = bits ? 1.0 / std::log(2.0) : 1.0;

  const std::vector<Json> lines = run_trials(trials, c.jobs(), [&](std::uint64_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(s);
    const double gap = ssa_gap(DensityMatrix(random_labeled_state(rng, space)));
    return Json{{"trial", i},
                {"seed", s},
                {"gap", gap * unit},
                {"verdict", gap < -tol ? "VIOLATION" : "OK"}};
  });
  Emitter emit{sink, {}};
  double min_gap = std::numeric_limits<double>::infinity();
  for (const Json& l : lines) {
    emit(l);
    if (l["verdict"] == "VIOLATION") ++emit.result.violations;
    min_gap = std::min(min_gap, l["gap"].get<double>());
  }
  emit({{"summary", true},
        {"command", "ssa"},
        {"unit", bits ? "bits" : "nats"},
        {"trials", trials},
        {"violations", emit.result.violations},
        {"min_gap", min_gap}});
  return emit.result;
}

CampaignResult run_ssa_bridge(const Config& c, const LineSink& sink) {
  const std::vector<Index> dims = c.dims({2, 2, 2});
  if (dims.size() != 3) schema("ssa-bridge needs 3 dims");
  const TensorSpace space(dims);
  const int trials = c.trials(20);
  const std::uint64_t seed = c.seed();
  const std::vector<double> eps = c.numbers("eps", {0.02, 0.01, 0.005});
  if (eps.size() < 2) schema("\"eps\" needs at least two values");
  const std::vector<double> range = c.numbers("ratio_range", {1.5, 2.5});
  if (range.size() != 2) schema("\"ratio_range\" must be [lo, hi]");

  const std::vector<Json> lines = run_trials(trials, c.jobs(), [&](std::uint64_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(s);
    const DensityMatrix rho(random_labeled_state(rng, space));
    Json slope1 = Json::array(), slope2 = Json::array(), margin = Json::array();
    std::vector<double> err1, err2;
    double limit1 = 0.0, limit2 = 0.0, gap = 0.0;
    for (double e : eps) {
      const SsaBridge b = ssa_from_minkowski(rho, e);
      slope1.push_back(b.slope1);
      slope2.push_back(b.slope2);
      margin.push_back(b.margin_slope);
      err1.push_back(std::abs(b.slope1 - b.limit1));
      err2.push_back(std::abs(b.slope2 - b.limit2));
      limit1 = b.limit1;
      limit2 = b.limit2;
      gap = b.ssa_gap;
    }
    Json ratio1 = Json::array(), ratio2 = Json::array();
    bool ok = true;
    for (size_t k = 0; k + 1 < eps.size(); ++k) {
      const double r1 = err1[k] / err1[k + 1];
      const double r2 = err2[k] / err2[k + 1];
      ratio1.push_back(r1);
      ratio2.push_back(r2);
      ok = ok && r1 >= range[0] && r1 <= range[1] && r2 >= range[0] && r2 <= range[1];
    }
    return Json{{"trial", i},           {"seed", s},           {"limit1", limit1},
                {"limit2", limit2},     {"slope1", slope1},    {"slope2", slope2},
                {"ratio1", ratio1},     {"ratio2", ratio2},    {"margin_slope", margin},
                {"ssa_gap", gap},       {"verdict", ok ? "OK" : "VIOLATION"}};
  });
  Emitter emit{sink, {}};
  for (const Json& l : lines) {
    emit(l);
    if (l["verdict"] == "VIOLATION") ++emit.result.violations;
  }
  emit({{"summary", true},
        {"command", "ssa-bridge"},
        {"trials", trials},
        {"violations", emit.result.violations}});
  return emit.result;
}

CampaignResult run_counterexample(const Config& c, const LineSink& sink) {
  const ExponentPair exps(c.required_number("p"), c.required_number("q"));
  const std::vector<Index> dims = c.dims({2});
  if (dims.size() != 1) schema("counterexample takes a single \"dim\"");
  const std::uint64_t seed = c.seed();
  CounterexampleBudget budget;
  budget.matrix_pairs = static_cast<int>(c.integer("matrix_pairs", budget.matrix_pairs));
  budget.rel_tol = c.tolerance("rel_tol", budget.rel_tol);
  budget.margin = c.number("margin", budget.margin);
  const Counterexample ce = find_counterexample(exps, dims[0], seed, budget);
  Json fixture = counterexample_to_json(ce, dims[0], seed);
  const std::string out = c.string("out", "");
  if (!out.empty()) write_json_file(out, fixture);

  Emitter emit{sink, {}};
  for (const char* k : {"a1", "a2", "b_negative", "b_positive", "v", "w"}) fixture.erase(k);
  fixture["command"] = "counterexample";
  if (!out.empty()) fixture["fixture"] = out;
  emit(fixture);
  return emit.result;
}

CampaignResult run_norm(const Config& c, const LineSink& sink) {
  const ExponentPair exps(c.required_number("p"), c.required_number("q"));
  const std::vector<Index> dims = c.dims({2, 2});
  if (dims.size() != 2) schema("norm needs 2 dims");
  const TensorSpace space(dims);
  const int trials = c.trials(10);
  const std::uint64_t seed = c.seed();
  const bool general = c.flag("general");
  OptimizerBudget budget;
  budget.max_iters = static_cast<int>(c.integer("max_iters", budget.max_iters));
  budget.grad_tol = c.tolerance("grad_tol", budget.grad_tol);
  const Index n = space.total_dim();

  const std::vector<Json> lines = run_trials(trials, c.jobs(), [&](std::uint64_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(s);
    Json line = {{"trial", i}, {"seed", s}};
    if (general) {
      const Matrix a = gaussian_matrix(rng, n, n);
      const GeneralNormResult traced =
          lqlp_general_norm(a, space, exps, BlockGrouping::kTracedSlot, budget);
      const GeneralNormResult first =
          lqlp_general_norm(a, space, exps, BlockGrouping::kFirstSlot, budget);
      line["value_traced"] = traced.value;
      line["value_first"] = first.value;
      line["iterations"] = {traced.embedded.iterations, first.embedded.iterations};
      line["verdict"] = "OK";
      return line;
    }
    const LabeledMatrix x(space, random_hermitian(rng, n));
    const NormResult r = lqlp_selfadjoint_norm(x, exps, budget);
    const Decomposition j = jordan_decomposition(x.hermitian());
    const double bound = psi(j.a, space, exps) + psi(j.b, space, exps);
    bool monotone = true;
    for (size_t k = 1; k < r.history.size(); ++k) monotone = monotone && r.history[k] <= r.history[k - 1];
    const bool ok = monotone && r.value <= bound;
    line["value"] = r.value;
    line["jordan_bound"] = bound;
    line["iterations"] = r.iterations;
    line["converged"] = r.converged;
    line["eig_a"] = real_vector_to_json(r.decomposition.a.eigenvalues());
    line["eig_b"] = real_vector_to_json(r.decomposition.b.eigenvalues());
    line["verdict"] = ok ? "OK" : "VIOLATION";
    return line;
  });
  Emitter emit{sink, {}};
  for (const Json& l : lines) {
    emit(l);
    if (l["verdict"] == "VIOLATION") ++emit.result.violations;
  }
  emit({{"summary", true},
        {"command", "norm"},
        {"p", exps.p()},
        {"q", exps.q()},
        {"general", general},
        {"trials", trials},
        {"violations", emit.result.violations}});
  return emit.result;
}

std::string exponent_tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

CampaignResult run_campaign(const Json& config, const LineSink& sink) {
  const Config c(config);
  const std::string cmd = c.string("command", "");
  if (cmd == "certify") return run_certify(c, sink);
  if (cmd == "minkowski") return run_minkowski(c, sink);
  if (cmd == "ssa") return run_ssa(c, sink);
  if (cmd == "ssa-bridge") return run_ssa_bridge(c, sink);
  if (cmd == "counterexample") return run_counterexample(c, sink);
  if (cmd == "norm") return run_norm(c, sink);
  schema("unknown campaign command \"" + cmd + "\"");
}

Json make_fixtures(const std::string& dir, std::uint64_t seed) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  Json written = Json::array();
  auto write = [&](const std::string& name, const Json& j) {
    const std::string path = (fs::path(dir) / name).string();
    write_json_file(path, j);
    written.push_back(name);
  };

  for (auto [p, q] : {std::pair{3.0, 1.0}, {2.5, 1.0}, {4.0, 2.0}, {3.0, 5.0}}) {
    const Counterexample ce = find_counterexample(ExponentPair(p, q), 2, seed);
    write("counterexample_p" + exponent_tag(p) + "_q" + exponent_tag(q) + ".json",
          counterexample_to_json(ce, 2, seed));
  }

  const TensorSpace bip({2, 2});
  const ExponentPair nm(2.0, 1.0);
  if (const auto w = find_psi_nonmonotonicity(bip, nm, seed)) {
    write("psi_nonmonotone.json",
          Json{{"p", nm.p()},
               {"q", nm.q()},
               {"seed", seed},
               {"attempts", w->attempts},
               {"psi_a", w->psi_a},
               {"psi_a_prime", w->psi_a_prime},
               {"a", matrix_to_json(w->a.matrix(), bip)},
               {"a_prime", matrix_to_json(w->a_prime.matrix(), bip)}});
  } else {
    fail(ErrorCode::kSearchExhausted, "no psi non-monotonicity witness found");
  }

  Rng rng(derive_seed(seed, 0x90d));
  Json golden = Json::array();
  {
    const std::array<PsdMatrix, 2> a{wishart(rng, 3), wishart(rng, 3)};
    golden.push_back({{"functional", "phi"},
                      {"p", 1.5},
                      {"q", 1.0},
                      {"inputs", {matrix_to_json(a[0].matrix()), matrix_to_json(a[1].matrix())}},
                      {"value", phi(a, ExponentPair(1.5, 1.0))}});
  }
  {
    const PsdMatrix a = wishart(rng, 4);
    golden.push_back({{"functional", "psi"},
                      {"p", 1.5},
                      {"q", 2.0},
                      {"inputs", {matrix_to_json(a.matrix(), bip)}},
                      {"value", psi(a, bip, ExponentPair(1.5, 2.0))}});
  }
  {
    const PsdMatrix a = wishart(rng, 3);
    const Matrix b = gaussian_matrix(rng, 3, 3);
    golden.push_back({{"functional", "upsilon"},
                      {"p", 1.5},
                      {"q", 1.0},
                      {"inputs", {matrix_to_json(a.matrix())}},
                      {"b", matrix_to_json(b)},
                      {"value", upsilon(a, b, ExponentPair(1.5, 1.0))}});
  }
  {
    const TensorSpace tri({2, 2, 2});
    const PsdMatrix rho = random_density_matrix(rng, 8);
    golden.push_back({{"functional", "entropy"},
                      {"inputs", {matrix_to_json(rho.matrix(), tri)}},
                      {"value", entropy(rho)}});
    golden.push_back({{"functional", "ssa_gap"},
                      {"inputs", {matrix_to_json(rho.matrix(), tri)}},
                      {"value", ssa_gap(DensityMatrix(LabeledMatrix(tri, rho.hermitian())))}});
  }
  write("golden_values.json", Json{{"seed", seed}, {"values", golden}});
  return written;
}

}  // namespace tracecvx
