#include "tracecvx/tracecvx.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "core/campaign.hpp"
#include "core/convexity.hpp"
#include "core/functionals.hpp"
#include "core/inequalities.hpp"
#include "core/json_io.hpp"
#include "core/norms.hpp"

struct tcx_matrix {
  tracecvx::Matrix m;
  std::optional<tracecvx::TensorSpace> space;
};

namespace {

using namespace tracecvx;

thread_local std::string g_last_error;

tcx_status set_error(tcx_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, mapping exceptions to status codes.
template <class Fn>
tcx_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return TCX_OK;
  } catch (const Error& e) {
    return set_error(static_cast<tcx_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(TCX_SCHEMA, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TCX_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(TCX_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PsdMatrix psd_of(const tcx_matrix* m) {
  require(m, "matrix");
  return PsdMatrix(HermitianMatrix(m->m));
}

const TensorSpace& space_of(const tcx_matrix* m) {
  if (!m->space) fail(ErrorCode::kSchema, "matrix has no \"factors\" tensor structure");
  return *m->space;
}

LabeledMatrix labeled_of(const tcx_matrix* m) {
  require(m, "matrix");
  return LabeledMatrix(space_of(m), HermitianMatrix(m->m));
}

tcx_matrix* wrap(ParsedMatrix p) { return new tcx_matrix{std::move(p.matrix), std::move(p.space)}; }

}  // namespace

extern "C" {

const char* tcx_version(void) { return "0.1.0"; }

const char* tcx_status_name(tcx_status status) {
  if (status == TCX_OK) return "Ok";
  if (status == TCX_INTERNAL) return "Internal";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* tcx_last_error(void) { return g_last_error.c_str(); }

tcx_status tcx_matrix_from_json(const char* json, tcx_matrix** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    Json j;
    try {
      j = Json::parse(json);
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kSchema, e.what());
    }
    *out = wrap(matrix_from_json(j));
  });
}

tcx_status tcx_matrix_load(const char* path, tcx_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(matrix_from_json(read_json_file(path)));
  });
}

tcx_status tcx_matrix_from_entries(int dim, const double* re, const double* im,
                                   const int* factors, int num_factors, tcx_matrix** out) {
  return guarded([&] {
    require(re, "re");
    require(out, "out");
    if (dim < 1) fail(ErrorCode::kInvalidArgument, "dim must be positive");
    if (num_factors < 0 || num_factors > 3 || (num_factors > 0 && factors == nullptr)) {
      fail(ErrorCode::kInvalidArgument, "bad factor list");
    }
    ParsedMatrix p;
    p.matrix.resize(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) {
        const size_t idx = static_cast<size_t>(i) * dim + k;
        p.matrix(i, k) = Complex(re[idx], im ? im[idx] : 0.0);
      }
    }
    if (num_factors > 0) {
      std::vector<Index> dims(factors, factors + num_factors);
      Index prod = 1;
      for (Index d : dims) {
        if (d < 1) fail(ErrorCode::kInvalidArgument, "factor dimensions must be positive");
        prod *= d;
      }
      if (prod != dim) fail(ErrorCode::kDimMismatch, "factor dimensions do not multiply to dim");
      p.space = TensorSpace(std::move(dims));
    }
    *out = wrap(std::move(p));
  });
}

tcx_status tcx_matrix_to_json(const tcx_matrix* m, char** out) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    *out = copy_string(matrix_to_json(m->m, m->space).dump());
  });
}

int tcx_matrix_dim(const tcx_matrix* m) { return m ? static_cast<int>(m->m.rows()) : 0; }

void tcx_matrix_free(tcx_matrix* m) { delete m; }

void tcx_string_free(char* s) { std::free(s); }

tcx_status tcx_phi(const tcx_matrix* const* mats, int m, double p, double q, double* out) {
  return guarded([&] {
    require(mats, "mats");
    require(out, "out");
    if (m < 1) fail(ErrorCode::kInvalidArgument, "phi needs at least one matrix");
    std::vector<PsdMatrix> a;
    for (int i = 0; i < m; ++i) a.push_back(psd_of(mats[i]));
    *out = phi(a, ExponentPair(p, q));
  });
}

tcx_status tcx_psi(const tcx_matrix* a, double p, double q, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = psi(labeled_of(a), ExponentPair(p, q));
  });
}

tcx_status tcx_upsilon(const tcx_matrix* a, const tcx_matrix* b, double p, double q,
                       double* out) {
  return guarded([&] {
    require(b, "b");
    require(out, "out");
    *out = upsilon(psd_of(a), b->m, ExponentPair(p, q));
  });
}

tcx_status tcx_entropy(const tcx_matrix* rho, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = entropy(psd_of(rho));
  });
}

tcx_status tcx_ssa_gap(const tcx_matrix* rho, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = ssa_gap(DensityMatrix(labeled_of(rho)));
  });
}

tcx_status tcx_schatten_norm(const tcx_matrix* a, double q, double* out) {
  return guarded([&] {
    require(a, "matrix");
    require(out, "out");
    *out = schatten_norm_general(a->m, q);
  });
}

tcx_status tcx_skew_information(const tcx_matrix* rho, const tcx_matrix* k, double* out) {
  return guarded([&] {
    require(k, "k");
    require(out, "out");
    *out = skew_information(psd_of(rho), HermitianMatrix(k->m)).difference_form;
  });
}

tcx_status tcx_minkowski(const tcx_matrix* a, double p, double q, char** report) {
  return guarded([&] {
    require(report, "report");
    const LabeledMatrix la = labeled_of(a);
    const ExponentPair exps(p, q);
    const MinkowskiVerdict v = la.space().num_factors() == 2 ? minkowski_two_space(la, exps)
                                                             : minkowski_sides(la, exps);
    const Json j = {{"p", v.p},           {"q", v.q},
                    {"lhs", v.lhs},       {"rhs", v.rhs},
                    {"direction", direction_name(v.direction)},
                    {"margin", v.margin}, {"holds", v.holds()}};
    *report = copy_string(j.dump());
  });
}

tcx_status tcx_lqlp_norm(const tcx_matrix* x, double p, double q, int general, char** report) {
  return guarded([&] {
    require(x, "matrix");
    require(report, "report");
    const ExponentPair exps(p, q);
    const TensorSpace& space = space_of(x);
    Json j;
    if (general) {
      const GeneralNormResult t = lqlp_general_norm(x->m, space, exps, BlockGrouping::kTracedSlot);
      const GeneralNormResult f = lqlp_general_norm(x->m, space, exps, BlockGrouping::kFirstSlot);
      j = {{"p", p},
           {"q", q},
           {"value_traced", t.value},
           {"value_first", f.value},
           {"iterations", {t.embedded.iterations, f.embedded.iterations}},
           {"converged", {t.embedded.converged, f.embedded.converged}}};
    } else {
      const LabeledMatrix lx(space, HermitianMatrix(x->m));
      const NormResult r = lqlp_selfadjoint_norm(lx, exps);
      const Decomposition jd = jordan_decomposition(lx.hermitian());
      j = {{"p", p},
           {"q", q},
           {"value", r.value},
           {"jordan_bound", psi(jd.a, space, exps) + psi(jd.b, space, exps)},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"eig_a", real_vector_to_json(r.decomposition.a.eigenvalues())},
           {"eig_b", real_vector_to_json(r.decomposition.b.eigenvalues())}};
    }
    *report = copy_string(j.dump());
  });
}

tcx_status tcx_uhlmann_average(const tcx_matrix* a, int factor, tcx_matrix** out) {
  return guarded([&] {
    require(out, "out");
    const LabeledMatrix avg = uhlmann_average(labeled_of(a), factor);
    *out = new tcx_matrix{avg.matrix(), avg.space()};
  });
}

tcx_status tcx_run_campaign(const char* config_json, tcx_line_sink sink, void* user,
                            size_t* violations) {
  return guarded([&] {
    require(config_json, "config");
    require(reinterpret_cast<const void*>(sink), "sink");
    Json config;
    try {
      config = Json::parse(config_json);
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kSchema, e.what());
    }
    const CampaignResult r =
        run_campaign(config, [&](const std::string& line) { sink(line.c_str(), user); });
    if (violations) *violations = r.violations;
  });
}

tcx_status tcx_find_counterexample(double p, double q, int dim, uint64_t seed, char** fixture) {
  return guarded([&] {
    require(fixture, "fixture");
    const Counterexample ce = find_counterexample(ExponentPair(p, q), dim, seed);
    *fixture = copy_string(counterexample_to_json(ce, dim, seed).dump());
  });
}

tcx_status tcx_make_fixtures(const char* dir, uint64_t seed) {
  return guarded([&] {
    require(dir, "dir");
    make_fixtures(dir, seed);
  });
}

}  // extern "C"
