// Command-line driver over the tracecvx C API.
//
// Exit codes: 0 success, 1 a claimed inequality was violated, 2 bad input
// (schema, I/O, usage), 3 domain error (non-PSD input, bad regime, ...).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracecvx/tracecvx.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

int exit_code(tcx_status s) {
  switch (s) {
    case TCX_OK: return kExitOk;
    case TCX_SCHEMA:
    case TCX_IO: return kExitInput;
    default: return kExitDomain;
  }
}

int report_failure(tcx_status s) {
  std::cerr << "error (" << tcx_status_name(s) << "): " << tcx_last_error() << '\n';
  return exit_code(s);
}

struct MatrixDeleter {
  void operator()(tcx_matrix* m) const { tcx_matrix_free(m); }
};
using MatrixPtr = std::unique_ptr<tcx_matrix, MatrixDeleter>;

struct StringDeleter {
  void operator()(char* s) const { tcx_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Settings shared by the campaign subcommands. Only flags that were given
// override values from --config.
struct CampaignFlags {
  std::optional<std::string> functional;
  std::optional<double> p, q;
  std::optional<int> dim, m, trials, jobs, max_iters, matrix_pairs;
  std::vector<int> dims;
  std::optional<std::uint64_t> seed;
  std::optional<double> rel_tol, tol, grad_tol;
  std::vector<double> eps;
  bool strict = false;
  bool bits = false;
  bool general = false;
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, CampaignFlags& f) {
  sub->add_option("--seed", f.seed, "Master seed (default: $TCX_SEED or 0)");
  sub->add_option("--trials", f.trials, "Number of seeded trials");
  sub->add_option("--jobs", f.jobs, "Worker threads; output does not depend on it");
  sub->add_flag("--strict", f.strict, "Halve every tolerance");
  sub->add_option("--config", f.config, "JSON config file; flags override its fields");
  sub->add_option("--out", f.out, "Write JSON lines here instead of stdout");
}

void add_exponents(CLI::App* sub, CampaignFlags& f) {
  sub->add_option("--p", f.p, "Exponent p");
  sub->add_option("--q", f.q, "Exponent q");
}

void add_dims(CLI::App* sub, CampaignFlags& f) {
  sub->add_option("--dim", f.dim, "Matrix dimension");
  sub->add_option("--dims", f.dims, "Tensor factor dimensions, e.g. 2,2,2")->delimiter(',');
}

std::uint64_t default_seed() {
  const char* env = std::getenv("TCX_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw CLI::ValidationError("TCX_SEED", "must be a nonnegative integer");
  }
}

Json build_config(const std::string& command, const CampaignFlags& f) {
  Json c = Json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot open config " + f.config);
    c = Json::parse(in);
    if (!c.is_object()) throw std::runtime_error("config must be a JSON object");
  }
  c["command"] = command;
  if (f.functional) c["functional"] = *f.functional;
  if (f.p) c["p"] = *f.p;
  if (f.q) c["q"] = *f.q;
  if (f.dim) {
    c["dim"] = *f.dim;
    c.erase("dims");
  }
  if (!f.dims.empty()) {
    c["dims"] = f.dims;
    c.erase("dim");
  }
  if (f.m) c["m"] = *f.m;
  if (f.trials) c["trials"] = *f.trials;
  if (f.jobs) c["jobs"] = *f.jobs;
  if (f.seed) {
    c["seed"] = *f.seed;
  } else if (!c.contains("seed")) {
    c["seed"] = default_seed();
  }
  if (f.rel_tol) c["rel_tol"] = *f.rel_tol;
  if (f.tol) c["tol"] = *f.tol;
  if (f.grad_tol) c["grad_tol"] = *f.grad_tol;
  if (f.max_iters) c["max_iters"] = *f.max_iters;
  if (f.matrix_pairs) c["matrix_pairs"] = *f.matrix_pairs;
  if (!f.eps.empty()) c["eps"] = f.eps;
  if (f.strict) c["strict"] = true;
  if (f.bits) c["bits"] = true;
  if (f.general) c["general"] = true;
  return c;
}

void write_line(const char* line, void* user) {
  std::ostream& os = *static_cast<std::ostream*>(user);
  os << line << '\n';
}

int run_campaign(const std::string& command, const CampaignFlags& f, const std::string& fixture) {
  Json config;
  try {
    config = build_config(command, f);
  } catch (const std::exception& e) {
    std::cerr << "error (Schema): " << e.what() << '\n';
    return kExitInput;
  }
  if (!fixture.empty()) config["out"] = fixture;
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) {
      std::cerr << "error (Io): cannot write " << f.out << '\n';
      return kExitInput;
    }
    os = &file;
  }
  size_t violations = 0;
  const std::string text = config.dump();
  const tcx_status s = tcx_run_campaign(text.c_str(), write_line, os, &violations);
  os->flush();
  if (s != TCX_OK) return report_failure(s);
  return violations > 0 ? kExitViolation : kExitOk;
}

std::string exponent_tag(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

struct EvalFlags {
  std::string functional;
  std::vector<std::string> files;
  double p = 1.0;
  double q = 1.0;
  std::string b;
  std::string k;
  bool bits = false;
};

int run_eval(const EvalFlags& e) {
  std::vector<MatrixPtr> mats;
  auto load = [&](const std::string& path) -> tcx_status {
    tcx_matrix* m = nullptr;
    const tcx_status s = tcx_matrix_load(path.c_str(), &m);
    if (s == TCX_OK) mats.emplace_back(m);
    return s;
  };
  for (const std::string& f : e.files) {
    if (const tcx_status s = load(f); s != TCX_OK) return report_failure(s);
  }
  auto need = [&](size_t n) {
    if (mats.size() != n) {
      std::cerr << "error: eval " << e.functional << " takes " << n << " matrix file(s)\n";
      return false;
    }
    return true;
  };
  auto extra = [&](const std::string& path, const char* flag) -> tcx_matrix* {
    if (path.empty()) {
      std::cerr << "error: eval " << e.functional << " needs " << flag << '\n';
      return nullptr;
    }
    if (const tcx_status s = load(path); s != TCX_OK) {
      report_failure(s);
      return nullptr;
    }
    return mats.back().get();
  };

  double value = 0.0;
  tcx_status s = TCX_OK;
  const double unit = e.bits ? 1.0 / std::log(2.0) : 1.0;
  if (e.functional == "phi") {
    if (mats.empty()) {
      std::cerr << "error: eval phi needs at least one matrix file\n";
      return kExitInput;
    }
    std::vector<const tcx_matrix*> ptrs;
    for (const auto& m : mats) ptrs.push_back(m.get());
    s = tcx_phi(ptrs.data(), static_cast<int>(ptrs.size()), e.p, e.q, &value);
  } else if (e.functional == "psi") {
    if (!need(1)) return kExitInput;
    s = tcx_psi(mats[0].get(), e.p, e.q, &value);
  } else if (e.functional == "upsilon") {
    if (!need(1)) return kExitInput;
    tcx_matrix* b = extra(e.b, "--b");
    if (!b) return kExitInput;
    s = tcx_upsilon(mats[0].get(), b, e.p, e.q, &value);
  } else if (e.functional == "entropy") {
    if (!need(1)) return kExitInput;
    s = tcx_entropy(mats[0].get(), &value);
    value *= unit;
  } else if (e.functional == "ssa") {
    if (!need(1)) return kExitInput;
    s = tcx_ssa_gap(mats[0].get(), &value);
    value *= unit;
  } else if (e.functional == "schatten") {
    if (!need(1)) return kExitInput;
    s = tcx_schatten_norm(mats[0].get(), e.q, &value);
  } else if (e.functional == "skew") {
    if (!need(1)) return kExitInput;
    tcx_matrix* k = extra(e.k, "--k");
    if (!k) return kExitInput;
    s = tcx_skew_information(mats[0].get(), k, &value);
  } else {
    std::cerr << "error: unknown functional " << e.functional << '\n';
    return kExitInput;
  }
  if (s != TCX_OK) return report_failure(s);
  std::printf("%.15g\n", value);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracecvx: numerical verification of trace inequalities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tcx_version());

  EvalFlags ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a functional on JSON matrices");
  eval->add_option("functional", ev.functional,
                   "phi, psi, upsilon, entropy, ssa, schatten or skew")
      ->required();
  eval->add_option("files", ev.files, "Matrix JSON files");
  eval->add_option("--p", ev.p, "Exponent p");
  eval->add_option("--q", ev.q, "Exponent q");
  eval->add_option("--b", ev.b, "Matrix B for upsilon");
  eval->add_option("--k", ev.k, "Observable K for skew");
  eval->add_flag("--bits", ev.bits, "Report entropies in bits");

  CampaignFlags cf;
  CLI::App* certify = app.add_subcommand("certify", "Midpoint convexity certification");
  certify->add_option("functional", cf.functional, "phi, psi, upsilon, joint_trace or skew");
  add_exponents(certify, cf);
  add_dims(certify, cf);
  certify->add_option("--m", cf.m, "Number of phi arguments");
  certify->add_option("--rel-tol", cf.rel_tol, "Relative gap tolerance");
  add_common(certify, cf);

  CampaignFlags mf;
  CLI::App* mink = app.add_subcommand("minkowski", "Tripartite Minkowski trace inequality");
  add_exponents(mink, mf);
  add_dims(mink, mf);
  mink->add_option("--rel-tol", mf.rel_tol, "Relative margin tolerance");
  add_common(mink, mf);

  CampaignFlags sf;
  CLI::App* ssa = app.add_subcommand("ssa", "Strong subadditivity on random states");
  add_dims(ssa, sf);
  ssa->add_option("--tol", sf.tol, "Absolute tolerance in nats");
  ssa->add_flag("--bits", sf.bits, "Report gaps in bits");
  add_common(ssa, sf);

  CampaignFlags bf;
  CLI::App* bridge = app.add_subcommand("ssa-bridge", "Finite-difference entropy bridge");
  add_dims(bridge, bf);
  bridge->add_option("--eps", bf.eps, "Step sizes, e.g. 0.02,0.01,0.005")->delimiter(',');
  add_common(bridge, bf);

  CampaignFlags xf;
  std::string fixture;
  CLI::App* cex = app.add_subcommand("counterexample", "Search a convexity counterexample");
  add_exponents(cex, xf);
  add_dims(cex, xf);
  cex->add_option("--fixture", fixture, "Fixture path (default counterexample_p<p>_q<q>.json)");
  cex->add_option("--matrix-pairs", xf.matrix_pairs, "Random matrix pairs to try");
  add_common(cex, xf);

  CampaignFlags nf;
  CLI::App* norm = app.add_subcommand("norm", "Decomposition-infimum L^q(L^p) norm");
  add_exponents(norm, nf);
  add_dims(norm, nf);
  norm->add_flag("--general", nf.general, "Random general matrices via the block embedding");
  norm->add_option("--max-iters", nf.max_iters, "Optimizer iteration cap");
  norm->add_option("--grad-tol", nf.grad_tol, "Optimizer stopping tolerance");
  add_common(norm, nf);

  std::string fixture_dir = "fixtures";
  std::optional<std::uint64_t> fixture_seed;
  CLI::App* mk = app.add_subcommand("make-fixtures", "Regenerate the fixture directory");
  mk->add_option("--dir", fixture_dir, "Output directory");
  mk->add_option("--seed", fixture_seed, "Master seed (default: $TCX_SEED or 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*eval) return run_eval(ev);
    if (*certify) return run_campaign("certify", cf, "");
    if (*mink) return run_campaign("minkowski", mf, "");
    if (*ssa) return run_campaign("ssa", sf, "");
    if (*bridge) return run_campaign("ssa-bridge", bf, "");
    if (*norm) return run_campaign("norm", nf, "");
    if (*cex) {
      if (fixture.empty() && xf.p && xf.q) {
        fixture = "counterexample_p" + exponent_tag(*xf.p) + "_q" + exponent_tag(*xf.q) + ".json";
      }
      return run_campaign("counterexample", xf, fixture);
    }
    if (*mk) {
      const tcx_status s =
          tcx_make_fixtures(fixture_dir.c_str(), fixture_seed ? *fixture_seed : default_seed());
      if (s != TCX_OK) return report_failure(s);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
