#include "stabsens/stability_sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace stabsens {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kStepFraction = 0.98;
constexpr double kStallFactor = 0.995;
constexpr int kStallWindow = 10;

// Below this tolerance the endgame switches to long double: certifying
// cone membership of the dual in plain double leaves the index with
// roughly 1e-9 of uncertainty no matter how small the gap reads.
constexpr double kExtendedPrecisionTol = 5e-9;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Blocks3 {
  std::array<Mat<Scalar>, 3> blocks;

  template <typename Other>
  static Blocks3 from(const Blocks3<Other>& other) {
    Blocks3 out;
    for (int b = 0; b < 3; ++b) {
      out.blocks[b] = other.blocks[b].template cast<Scalar>();
    }
    return out;
  }

  Scalar trace_product(const Blocks3& other) const {
    Scalar acc = 0;
    for (int b = 0; b < 3; ++b) {
      acc += blocks[b].cwiseProduct(other.blocks[b]).sum();
    }
    return acc;
  }
};

template <typename Scalar>
Vec<Scalar> svec_generic(const Mat<Scalar>& x) {
  const int n = static_cast<int>(x.rows());
  const Scalar root2 = std::sqrt(Scalar(2));
  Vec<Scalar> out(triangular_size(n));
  int p = 0;
  for (int i = 0; i < n; ++i) {
    out[p++] = x(i, i);
    for (int j = i + 1; j < n; ++j) out[p++] = root2 * x(i, j);
  }
  return out;
}

template <typename Scalar>
Mat<Scalar> smat_generic(const Vec<Scalar>& v, int n) {
  const Scalar root2 = std::sqrt(Scalar(2));
  Mat<Scalar> out(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i) {
    out(i, i) = v[p++];
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = v[p] / root2;
      out(j, i) = out(i, j);
      ++p;
    }
  }
  return out;
}

// Problem data replicated in the working scalar type. phi is ordered as
// (eta, svec(Phi)).
template <typename Scalar>
struct Problem {
  int n = 0;
  int m = 0;
  Scalar eps = 0;
  Mat<Scalar> J;
  Mat<Scalar> id;
  Vec<Scalar> c;

  static Problem from(const StabilitySdp& sdp) {
    Problem out;
    out.n = sdp.n();
    out.m = sdp.m();
    out.eps = static_cast<Scalar>(sdp.eps());
    out.J = sdp.J().template cast<Scalar>();
    out.id = Mat<Scalar>::Identity(out.n, out.n);
    out.c = sdp.c().template cast<Scalar>();
    return out;
  }

  Blocks3<Scalar> assemble(const Vec<Scalar>& phi) const {
    const Mat<Scalar> big_phi = smat_generic<Scalar>(phi.tail(m - 1), n);
    Blocks3<Scalar> f;
    f.blocks[0] = phi[0] * id - J.transpose() * big_phi - big_phi * J;
    f.blocks[0] = (Scalar(0.5) * (f.blocks[0] + f.blocks[0].transpose())).eval();
    f.blocks[1] = big_phi - eps * id;
    f.blocks[2] = id - big_phi;
    return f;
  }

  // Linear part only: sum_i dx_i F_i.
  Blocks3<Scalar> delta_slack(const Vec<Scalar>& dx) const {
    const Mat<Scalar> dphi = smat_generic<Scalar>(dx.tail(m - 1), n);
    Blocks3<Scalar> ds;
    ds.blocks[0] = dx[0] * id - J.transpose() * dphi - dphi * J;
    ds.blocks[0] = (Scalar(0.5) * (ds.blocks[0] + ds.blocks[0].transpose())).eval();
    ds.blocks[1] = dphi;
    ds.blocks[2] = -dphi;
    return ds;
  }

  // Component i is Tr(F_i X).
  Vec<Scalar> adjoint(const Blocks3<Scalar>& x) const {
    Vec<Scalar> out(m);
    out[0] = x.blocks[0].trace();
    Mat<Scalar> y = -(J * x.blocks[0] + x.blocks[0] * J.transpose()) +
                    x.blocks[1] - x.blocks[2];
    y = (Scalar(0.5) * (y + y.transpose())).eval();
    out.tail(m - 1) = svec_generic<Scalar>(y);
    return out;
  }
};

template <typename Scalar>
Scalar gershgorin_bound(const Mat<Scalar>& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Largest step a in [0, cap] with X + a * dX staying positive definite,
// given the Cholesky factor L of X.
template <typename Scalar>
Scalar max_step(const Mat<Scalar>& chol_lower, const Mat<Scalar>& dx,
                Scalar cap) {
  const auto& L = chol_lower.template triangularView<Eigen::Lower>();
  Mat<Scalar> scaled = L.solve(dx);
  scaled = L.solve(scaled.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
      (Scalar(0.5) * (scaled + scaled.transpose())).eval(),
      Eigen::EigenvaluesOnly);
  const Scalar lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= Scalar(-1e-14)) return cap;
  return std::min(cap, Scalar(-1) / lam_min);
}

template <typename Scalar>
struct IpmState {
  Vec<Scalar> x;
  Blocks3<Scalar> Z;
  bool optimal = false;

  template <typename Other>
  static IpmState from(const IpmState<Other>& other) {
    IpmState out;
    out.x = other.x.template cast<Scalar>();
    out.Z = Blocks3<Scalar>::template from<Other>(other.Z);
    out.optimal = other.optimal;
    return out;
  }
};

enum class IpmExit { Converged, Stalled, Trouble };

template <typename Scalar>
struct IpmResult {
  IpmState<Scalar> state;
  IpmExit exit = IpmExit::Trouble;
};

// Primal-dual path following with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector. Primal iterates are exactly feasible by
// construction (S is reassembled from x); the start is exactly
// dual-feasible, so only complementarity has to be driven down.
template <typename Scalar>
IpmResult<Scalar> run_ipm(const Problem<Scalar>& prob, Scalar tol,
                          IpmState<Scalar> state) {
  const int n = prob.n;
  const int m = prob.m;
  const Scalar cone_dim = Scalar(3 * n);
  const Scalar eps_mach = std::numeric_limits<Scalar>::epsilon();

  IpmResult<Scalar> result;

  // Entrywise complementarity target: the certificate quotes the
  // symmetrized product within 1e-7, so push it there when the working
  // precision allows; without strict complementarity it floors near
  // sqrt(mu) and the best contract-satisfying iterate wins instead.
  const Scalar compl_target =
      std::min(Scalar(10) * tol, Scalar(1e-7));

  // Gram matrix of the coefficient map under the identity metric,
  // bounded below by 2 I; used by the exit projection.
  Eigen::LLT<Mat<Scalar>> gram_llt;
  Mat<Scalar> gram(m, m);
  {
    Vec<Scalar> unit = Vec<Scalar>::Zero(m);
    for (int i = 0; i < m; ++i) {
      unit[i] = 1;
      gram.col(i) = prob.adjoint(prob.delta_slack(unit));
      unit[i] = 0;
    }
    gram = (Scalar(0.5) * (gram + gram.transpose())).eval();
    gram_llt.compute(gram);
    if (gram_llt.info() != Eigen::Success) {
      return result;
    }
  }

  // Exit projection: removes the dual defect exactly while keeping
  // Tr(S Z) unchanged, via the Gram system bordered with S. The result
  // may graze the cone boundary within the certificate tolerance, which
  // is fine for reporting but not for further iterations.
  auto exit_projection = [&](const Blocks3<Scalar>& s, Blocks3<Scalar>& z) {
    const Vec<Scalar> defect = prob.c - prob.adjoint(z);
    if (defect.cwiseAbs().maxCoeff() <= Scalar(1e-14)) return true;
    Mat<Scalar> bordered(m + 1, m + 1);
    const Vec<Scalar> a_of_s = prob.adjoint(s);
    bordered.topLeftCorner(m, m) = gram;
    bordered.topRightCorner(m, 1) = a_of_s;
    bordered.bottomLeftCorner(1, m) = a_of_s.transpose();
    bordered(m, m) = s.trace_product(s);
    Vec<Scalar> rhs(m + 1);
    rhs.head(m) = defect;
    rhs[m] = 0;
    Eigen::LDLT<Mat<Scalar>> ldlt(bordered);
    if (ldlt.info() != Eigen::Success) return false;
    const Vec<Scalar> wg = ldlt.solve(rhs);
    if (!wg.allFinite()) return false;

    Blocks3<Scalar> corrected = z;
    const Blocks3<Scalar> span_part = prob.delta_slack(wg.head(m));
    const Scalar dip_floor = -std::max(Scalar(1e3) * eps_mach, Scalar(5e-12));
    for (int b = 0; b < 3; ++b) {
      corrected.blocks[b] += span_part.blocks[b] + wg[m] * s.blocks[b];
      const Scalar lam_min =
          Eigen::SelfAdjointEigenSolver<Mat<Scalar>>(corrected.blocks[b],
                                                     Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      if (lam_min < std::min(dip_floor, Scalar(-5e-8))) return false;
    }
    if ((prob.c - prob.adjoint(corrected)).cwiseAbs().maxCoeff() >
        Scalar(1e-12)) {
      return false;
    }
    for (int b = 0; b < 3; ++b) {
      const Mat<Scalar> sz = s.blocks[b] * corrected.blocks[b];
      if ((Scalar(0.5) * (sz + sz.transpose())).cwiseAbs().maxCoeff() >
          compl_target) {
        return false;
      }
    }
    z = corrected;
    return true;
  };

  auto entrywise_compl = [](const Blocks3<Scalar>& s,
                            const Blocks3<Scalar>& z) {
    Scalar out = 0;
    for (int b = 0; b < 3; ++b) {
      const Mat<Scalar> sz = s.blocks[b] * z.blocks[b];
      out = std::max(out, (Scalar(0.5) * (sz + sz.transpose()))
                              .cwiseAbs()
                              .maxCoeff());
    }
    return out;
  };

  struct Snapshot {
    Vec<Scalar> x;
    Blocks3<Scalar> Z;
    Scalar score = std::numeric_limits<Scalar>::infinity();
  };
  Snapshot best;
  Snapshot contract_best;
  bool have_contract_best = false;
  int post_contract_iters = 0;

  int stall_count = 0;
  Scalar prev_score = std::numeric_limits<Scalar>::infinity();

  std::array<Mat<Scalar>, 3> Ls, Lz, Gs, Gis, Winv;
  std::array<Vec<Scalar>, 3> vdiag;

  Vec<Scalar>& x = state.x;
  Blocks3<Scalar>& Z = state.Z;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Blocks3<Scalar> S = prob.assemble(x);

    bool factor_ok = true;
    for (int b = 0; b < 3 && factor_ok; ++b) {
      Eigen::LLT<Mat<Scalar>> llt_s(S.blocks[b]);
      Eigen::LLT<Mat<Scalar>> llt_z(Z.blocks[b]);
      if (llt_s.info() != Eigen::Success ||
          llt_z.info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      Ls[b] = llt_s.matrixL();
      Lz[b] = llt_z.matrixL();
    }
    if (!factor_ok) {
      // Accepted iterates stay strictly interior by the backtracking
      // below, so this can only fire on a bad warm start.
      result.exit = IpmExit::Trouble;
      break;
    }

    const Scalar gap = S.trace_product(Z);
    const Scalar mu = gap / cone_dim;
    const Vec<Scalar> r_d = prob.c - prob.adjoint(Z);
    const Scalar dual_inf = r_d.cwiseAbs().maxCoeff();
    const Scalar compl_inf = entrywise_compl(S, Z);

    const Scalar score =
        std::max({dual_inf, gap < 0 ? -gap : gap, compl_inf / Scalar(10)});
    if (score < best.score) best = {x, Z, score};

    // Contract check; the gap-preserving projection repairs a dual that
    // lost its last digits to the ill-conditioned Schur system.
    if (gap <= tol) {
      Blocks3<Scalar> z_candidate = Z;
      const bool candidate_ok =
          dual_inf <= tol || exit_projection(S, z_candidate);
      if (candidate_ok) {
        const Scalar cand_compl = entrywise_compl(S, z_candidate);
        if (cand_compl <= compl_target) {
          Z = z_candidate;
          result.exit = IpmExit::Converged;
          state.optimal = true;
          break;
        }
        if (!have_contract_best || cand_compl < contract_best.score) {
          contract_best = {x, z_candidate, cand_compl};
          have_contract_best = true;
        }
        // A few recentering rounds usually shrink the entrywise product;
        // stop waiting once they clearly cannot.
        if (++post_contract_iters > 8) {
          x = contract_best.x;
          Z = contract_best.Z;
          result.exit = IpmExit::Converged;
          state.optimal = true;
          break;
        }
      }
    }
    if (score > Scalar(kStallFactor) * prev_score) {
      if (++stall_count >= kStallWindow) {
        result.exit = IpmExit::Stalled;
        break;
      }
    } else {
      stall_count = 0;
    }
    prev_score = std::min(prev_score, score);

    // Nesterov-Todd scaling per block: with S = L L^T and
    // L^T Z L = U diag(lam) U^T, the scaling point is W = G G^T with
    // G = L U diag(lam^{-1/4}); both scaled variables equal
    // diag(sqrt(lam)).
    bool scaling_ok = true;
    for (int b = 0; b < 3; ++b) {
      const Mat<Scalar> mzb = Ls[b].transpose() * Z.blocks[b] * Ls[b];
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(
          (Scalar(0.5) * (mzb + mzb.transpose())).eval());
      if (es.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      // M is congruent to Z, hence positive definite; floor the
      // eigenvalues so roundoff cannot feed zero into lam^{-1/4}.
      const Scalar floor_val =
          std::max(es.eigenvalues().maxCoeff(),
                   std::numeric_limits<Scalar>::min()) *
          Scalar(10) * eps_mach;
      const Vec<Scalar> lam = es.eigenvalues().cwiseMax(floor_val);
      const Vec<Scalar> lam_quarter = lam.array().pow(Scalar(0.25));
      Gs[b] = Ls[b] * es.eigenvectors() *
              lam_quarter.cwiseInverse().asDiagonal();
      Gis[b] = lam_quarter.asDiagonal() * es.eigenvectors().transpose() *
               Ls[b].template triangularView<Eigen::Lower>().solve(prob.id);
      Winv[b] = Gis[b].transpose() * Gis[b];
      Winv[b] = (Scalar(0.5) * (Winv[b] + Winv[b].transpose())).eval();
      vdiag[b] = lam.array().sqrt();
    }
    if (!scaling_ok) {
      result.exit = IpmExit::Trouble;
      break;
    }

    // Schur complement B_ij = sum_b Tr(F_i W^{-1} F_j W^{-1}); columns
    // are assembled through the adjoint using the rank-2 structure of
    // the coefficient matrices.
    Mat<Scalar> B(m, m);
    {
      const Mat<Scalar>& W1 = Winv[0];
      const Mat<Scalar> U1 = W1 * prob.J.transpose();
      const Mat<Scalar> JU = prob.J * U1;
      const Mat<Scalar> JV = prob.J * W1;
      const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));

      // Column for F_1 = diag(I, 0, 0).
      {
        const Mat<Scalar> h1 = W1 * W1;
        Mat<Scalar> y = -(prob.J * h1 + h1 * prob.J.transpose());
        B(0, 0) = h1.trace();
        B.block(1, 0, m - 1, 1) =
            svec_generic<Scalar>((Scalar(0.5) * (y + y.transpose())).eval());
      }

      Mat<Scalar> y(n, n);
      auto sym_outer = [&](const auto& p, const auto& q, Scalar coef) {
        y.noalias() += coef * p * q.transpose();
        y.noalias() += coef * q * p.transpose();
      };
      int col_idx = 1;
      for (int a = 0; a < n; ++a) {
        for (int bcol = a; bcol < n; ++bcol) {
          const Scalar s = (a == bcol) ? Scalar(0.5) : inv_sqrt2;
          y.setZero();
          // -(J H1 + H1 J^T) with H1 = -s sym(u_a v_b^T + u_b v_a^T),
          // u = W^{-1} J^T e, v = W^{-1} e.
          sym_outer(JU.col(a), W1.col(bcol), s);
          sym_outer(JV.col(bcol), U1.col(a), s);
          sym_outer(JU.col(bcol), W1.col(a), s);
          sym_outer(JV.col(a), U1.col(bcol), s);
          // + H2 - H3, the scaled images in blocks 2 and 3.
          sym_outer(Winv[1].col(a), Winv[1].col(bcol), s);
          sym_outer(Winv[2].col(a), Winv[2].col(bcol), s);
          B(0, col_idx) = Scalar(-2) * s *
                          (U1.col(a).dot(W1.col(bcol)) +
                           U1.col(bcol).dot(W1.col(a)));
          B.block(1, col_idx, m - 1, 1) =
              svec_generic<Scalar>((Scalar(0.5) * (y + y.transpose())).eval());
          ++col_idx;
        }
      }
      B = (Scalar(0.5) * (B + B.transpose())).eval();
    }

    // Ridge-retry Cholesky plus refinement against the unregularized
    // matrix; the conditioning degrades like 1/mu.
    Eigen::LLT<Mat<Scalar>> schur(B);
    if (schur.info() != Eigen::Success) {
      Scalar ridge =
          Scalar(100) * eps_mach * B.diagonal().cwiseAbs().maxCoeff();
      for (int attempt = 0; attempt < 8; ++attempt) {
        Mat<Scalar> regularized = B;
        regularized.diagonal().array() += ridge;
        schur.compute(regularized);
        if (schur.info() == Eigen::Success) break;
        ridge *= Scalar(100);
      }
      if (schur.info() != Eigen::Success) {
        result.exit = IpmExit::Trouble;
        break;
      }
    }
    auto schur_solve = [&](const Vec<Scalar>& rhs) {
      Vec<Scalar> dx = schur.solve(rhs);
      for (int round = 0; round < 2; ++round) {
        dx += schur.solve(rhs - B * dx).eval();
      }
      return dx;
    };

    auto dual_step = [&](const Blocks3<Scalar>& k,
                         const Blocks3<Scalar>& ds) {
      Blocks3<Scalar> dz;
      for (int b = 0; b < 3; ++b) {
        dz.blocks[b] = k.blocks[b] - Winv[b] * ds.blocks[b] * Winv[b];
        dz.blocks[b] =
            (Scalar(0.5) * (dz.blocks[b] + dz.blocks[b].transpose())).eval();
      }
      return dz;
    };
    auto solve_direction = [&](const Blocks3<Scalar>& k) {
      const Vec<Scalar> rhs = prob.adjoint(k) - r_d;
      const Vec<Scalar> dx = schur_solve(rhs);
      const Blocks3<Scalar> ds = prob.delta_slack(dx);
      const Blocks3<Scalar> dz = dual_step(k, ds);
      return std::tuple(dx, ds, dz);
    };

    // Predictor (affine direction): K = -Z.
    Blocks3<Scalar> k_aff;
    for (int b = 0; b < 3; ++b) k_aff.blocks[b] = -Z.blocks[b];
    const auto [dx_aff, ds_aff, dz_aff] = solve_direction(k_aff);

    Scalar alpha_p_aff = 1, alpha_d_aff = 1;
    for (int b = 0; b < 3; ++b) {
      alpha_p_aff =
          std::min(alpha_p_aff, max_step<Scalar>(Ls[b], ds_aff.blocks[b], 1));
      alpha_d_aff =
          std::min(alpha_d_aff, max_step<Scalar>(Lz[b], dz_aff.blocks[b], 1));
    }
    Scalar mu_aff = 0;
    for (int b = 0; b < 3; ++b) {
      mu_aff += (S.blocks[b] + alpha_p_aff * ds_aff.blocks[b])
                    .cwiseProduct(Z.blocks[b] +
                                  alpha_d_aff * dz_aff.blocks[b])
                    .sum();
    }
    mu_aff = std::max(mu_aff / cone_dim, Scalar(0));
    const Scalar sigma = std::clamp(
        Scalar(std::pow(double(mu_aff / mu), 3.0)), Scalar(1e-10), Scalar(1));

    // Corrector: target sigma mu on the central path, with the Mehrotra
    // second-order term formed in the scaled space where both variables
    // are diag(vdiag). Without the term it is a pure centering step.
    auto corrector_direction = [&](Scalar sigma_val, bool second_order) {
      Blocks3<Scalar> k_cor;
      for (int b = 0; b < 3; ++b) {
        Mat<Scalar> r;
        if (second_order) {
          const Mat<Scalar> ds_t =
              Gis[b] * ds_aff.blocks[b] * Gis[b].transpose();
          const Mat<Scalar> dz_t =
              Gs[b].transpose() * dz_aff.blocks[b] * Gs[b];
          r = Scalar(-0.5) * (ds_t * dz_t + dz_t * ds_t);
        } else {
          r = Mat<Scalar>::Zero(n, n);
        }
        r.diagonal().array() += sigma_val * mu;
        r.diagonal() -= vdiag[b].cwiseProduct(vdiag[b]);
        // Inverse of X -> (V X + X V)/2, entrywise in V's eigenbasis.
        for (int row = 0; row < n; ++row) {
          for (int col = 0; col < n; ++col) {
            r(row, col) *= Scalar(2) / (vdiag[b][row] + vdiag[b][col]);
          }
        }
        k_cor.blocks[b] = Gis[b].transpose() * r * Gis[b];
        k_cor.blocks[b] =
            (Scalar(0.5) * (k_cor.blocks[b] + k_cor.blocks[b].transpose()))
                .eval();
      }
      return solve_direction(k_cor);
    };

    auto step_lengths = [&](const Blocks3<Scalar>& ds,
                            const Blocks3<Scalar>& dz) {
      Scalar alpha_p = 1, alpha_d = 1;
      const Scalar frac = Scalar(kStepFraction);
      for (int b = 0; b < 3; ++b) {
        alpha_p = std::min(
            alpha_p, frac * max_step<Scalar>(Ls[b], ds.blocks[b],
                                             Scalar(1) / frac));
        alpha_d = std::min(
            alpha_d, frac * max_step<Scalar>(Lz[b], dz.blocks[b],
                                             Scalar(1) / frac));
      }
      return std::pair(alpha_p, alpha_d);
    };

    // Once the gap target is met, the remaining job is recentering.
    const bool recenter_only = gap <= tol && dual_inf <= tol;
    auto [dx, ds, dz] = recenter_only
                            ? corrector_direction(1, false)
                            : corrector_direction(sigma, true);
    auto [alpha_p, alpha_d] = step_lengths(ds, dz);
    if (!recenter_only && std::min(alpha_p, alpha_d) < Scalar(0.05)) {
      // The second-order term backfired; recenter instead.
      std::tie(dx, ds, dz) = corrector_direction(1, false);
      std::tie(alpha_p, alpha_d) = step_lengths(ds, dz);
    }

    // Accept only steps that keep both candidates strictly interior;
    // eigenvalue-based step lengths can overshoot at extreme
    // conditioning.
    bool accepted = false;
    Vec<Scalar> x_next;
    Blocks3<Scalar> z_next;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      x_next = x + alpha_p * dx;
      bool interior = true;
      const Blocks3<Scalar> s_next = prob.assemble(x_next);
      for (int b = 0; b < 3 && interior; ++b) {
        z_next.blocks[b] = Z.blocks[b] + alpha_d * dz.blocks[b];
        z_next.blocks[b] =
            (Scalar(0.5) * (z_next.blocks[b] + z_next.blocks[b].transpose()))
                .eval();
        interior = Eigen::LLT<Mat<Scalar>>(s_next.blocks[b]).info() ==
                       Eigen::Success &&
                   Eigen::LLT<Mat<Scalar>>(z_next.blocks[b]).info() ==
                       Eigen::Success;
      }
      if (interior) {
        accepted = true;
      } else {
        alpha_p *= Scalar(0.5);
        alpha_d *= Scalar(0.5);
      }
    }
    if (!accepted || std::max(alpha_p, alpha_d) < Scalar(1e-12)) {
      result.exit = IpmExit::Stalled;
      break;
    }
    x = x_next;
    Z = z_next;
  }

  if (!state.optimal) {
    if (have_contract_best) {
      x = contract_best.x;
      Z = contract_best.Z;
      state.optimal = true;
      result.exit = IpmExit::Converged;
    } else if (best.x.size() > 0) {
      x = best.x;
      Z = best.Z;
      const Blocks3<Scalar> s_best = prob.assemble(x);
      if (s_best.trace_product(Z) <= tol && exit_projection(s_best, Z)) {
        state.optimal = true;
        result.exit = IpmExit::Converged;
      }
    }
  }
  result.state = std::move(state);
  return result;
}

template <typename Scalar>
IpmState<Scalar> initial_state(const Problem<Scalar>& prob) {
  IpmState<Scalar> state;
  const int n = prob.n;

  // Strictly feasible primal start: Phi = (1 + eps)/2 I and eta large
  // enough that the decay block is positive definite (Gershgorin bound).
  state.x = Vec<Scalar>::Zero(prob.m);
  const Scalar phi0 = Scalar(0.5) * (Scalar(1) + prob.eps);
  state.x[0] =
      phi0 * gershgorin_bound<Scalar>(prob.J + prob.J.transpose()) + Scalar(1);
  for (int i = 0; i < n; ++i) {
    state.x[1 + packed_index(i, i, n)] = phi0;
  }

  // Exactly dual-feasible start: Upsilon_1 = I/n, and the remaining
  // blocks split the symmetric part of J Upsilon_1 + Upsilon_1 J^T
  // around a positive-definite shift.
  const Mat<Scalar> w0 = (prob.J + prob.J.transpose()) / Scalar(n);
  const Scalar beta = Scalar(0.5) * gershgorin_bound<Scalar>(w0) + Scalar(1);
  state.Z.blocks[0] = prob.id / Scalar(n);
  state.Z.blocks[1] = beta * prob.id + Scalar(0.5) * w0;
  state.Z.blocks[2] = beta * prob.id - Scalar(0.5) * w0;
  return state;
}

template <typename Scalar>
void fill_certificate(const Problem<Scalar>& prob,
                      const IpmState<Scalar>& state, StabilityCertificate* cert) {
  const Blocks3<Scalar> S = prob.assemble(state.x);
  cert->gap = static_cast<double>(S.trace_product(state.Z));
  cert->dual_residual = static_cast<double>(
      (prob.c - prob.adjoint(state.Z)).cwiseAbs().maxCoeff());
  cert->compl_residual = 0.0;
  for (int b = 0; b < 3; ++b) {
    const Mat<Scalar> sz = S.blocks[b] * state.Z.blocks[b];
    cert->compl_residual = std::max(
        cert->compl_residual,
        static_cast<double>((Scalar(0.5) * (sz + sz.transpose()))
                                .cwiseAbs()
                                .maxCoeff()));
    cert->upsilon[b] = SymMatrix::from_dense(
        state.Z.blocks[b].template cast<double>());
  }
  cert->eta = static_cast<double>(state.x[0]);
  cert->phi = smat(state.x.tail(prob.m - 1).template cast<double>().eval());
}

}  // namespace

StabilitySdp::StabilitySdp(Eigen::MatrixXd J, double eps)
    : n_(static_cast<int>(J.rows())),
      m_(1 + triangular_size(static_cast<int>(J.rows()))),
      eps_(eps),
      J_(std::move(J)) {
  if (J_.rows() != J_.cols() || J_.rows() < 1) {
    throw DimensionError("StabilitySdp: J must be square, dim >= 1");
  }
  if (!(eps_ > 0.0 && eps_ < 1.0)) {
    throw ConfigError("StabilitySdp: eps must satisfy 0 < eps < 1");
  }
  c_ = Eigen::VectorXd::Zero(m_);
  c_[0] = 1.0;
}

BlockDiag3 StabilitySdp::constant_term() const {
  BlockDiag3 f0 = BlockDiag3::zero(n_);
  f0.blocks[1] = -eps_ * Eigen::MatrixXd::Identity(n_, n_);
  f0.blocks[2] = Eigen::MatrixXd::Identity(n_, n_);
  return f0;
}

BlockDiag3 StabilitySdp::coefficient_matrix(int i) const {
  if (i < 0 || i > m_) {
    throw DimensionError("StabilitySdp: coefficient index out of range");
  }
  if (i == 0) return constant_term();
  BlockDiag3 fi = BlockDiag3::zero(n_);
  if (i == 1) {
    fi.blocks[0] = Eigen::MatrixXd::Identity(n_, n_);
    return fi;
  }
  // Basis element T for packed position i - 2.
  const SymMatrix t = [&] {
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(triangular_size(n_));
    coords[i - 2] = 1.0;
    return smat(coords);
  }();
  const Eigen::MatrixXd td = t.dense();
  fi.blocks[0] = -J_.transpose() * td - td * J_;
  fi.blocks[1] = td;
  fi.blocks[2] = -td;
  return fi;
}

BlockDiag3 StabilitySdp::assemble(
    const Eigen::Ref<const Eigen::VectorXd>& phi) const {
  if (phi.size() != m_) {
    throw DimensionError("StabilitySdp::assemble: phi has wrong length");
  }
  const Problem<double> prob = Problem<double>::from(*this);
  const Blocks3<double> f = prob.assemble(phi);
  return BlockDiag3{{f.blocks[0], f.blocks[1], f.blocks[2]}};
}

Eigen::VectorXd StabilitySdp::adjoint(const BlockDiag3& x) const {
  const Problem<double> prob = Problem<double>::from(*this);
  Blocks3<double> blocks{{x.blocks[0], x.blocks[1], x.blocks[2]}};
  return prob.adjoint(blocks);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::MaxIterations:
      return "MaxIterations";
    case SolveStatus::NumericalTrouble:
      return "NumericalTrouble";
  }
  return "Unknown";
}

StabilityCertificate solve_sdp(const StabilitySdp& sdp, double tol) {
  if (!(tol >= 1e-10)) {
    throw ConfigError("solve_sdp: tol must be >= 1e-10");
  }
  const auto t_start = std::chrono::steady_clock::now();

  StabilityCertificate cert;
  cert.n = sdp.n();
  cert.eps = sdp.eps();

  const Problem<double> prob = Problem<double>::from(sdp);
  const double phase1_tol = std::max(tol, kExtendedPrecisionTol);
  IpmResult<double> coarse =
      run_ipm<double>(prob, phase1_tol, initial_state(prob));

  auto exit_to_status = [](IpmExit exit, bool optimal) {
    if (optimal) return SolveStatus::Optimal;
    return exit == IpmExit::Trouble ? SolveStatus::NumericalTrouble
                                    : SolveStatus::MaxIterations;
  };

  if (tol >= kExtendedPrecisionTol) {
    cert.status = exit_to_status(coarse.exit, coarse.state.optimal);
    fill_certificate(prob, coarse.state, &cert);
  } else {
    // Tight tolerances exceed what double precision can certify (the
    // dual's cone membership carries ~1e-9 of roundoff): continue in
    // long double from the double solution.
    const Problem<long double> prob_l = Problem<long double>::from(sdp);
    IpmState<long double> warm =
        IpmState<long double>::from<double>(coarse.state);
    warm.optimal = false;
    // A cone-grazing double iterate is re-centered by nudging the dual
    // away from the boundary before restarting.
    for (int b = 0; b < 3; ++b) {
      const long double lam_min =
          Eigen::SelfAdjointEigenSolver<Mat<long double>>(
              warm.Z.blocks[b], Eigen::EigenvaluesOnly)
              .eigenvalues()
              .minCoeff();
      if (lam_min < 1e-13L) {
        warm.Z.blocks[b].diagonal().array() += (1e-13L - lam_min);
      }
    }
    IpmResult<long double> fine =
        run_ipm<long double>(prob_l, static_cast<long double>(tol), warm);
    cert.status = exit_to_status(fine.exit, fine.state.optimal);
    fill_certificate(prob_l, fine.state, &cert);
  }

  cert.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return cert;
}

StabilitySdp build_sdp(const Eigen::Ref<const Eigen::MatrixXd>& J,
                       double eps) {
  return StabilitySdp(J, eps);
}

StabilityCertificate stability_index(
    const Eigen::Ref<const Eigen::MatrixXd>& J, double eps, double tol) {
  return solve_sdp(build_sdp(J, eps), tol);
}

bool check_constraint(const StabilityCertificate& cert, double eta_bar) {
  if (cert.status != SolveStatus::Optimal) {
    throw StatusNotOptimal(
        "check_constraint: certificate status is " + to_string(cert.status) +
        ", need Optimal");
  }
  return cert.eta < eta_bar;
}

}  // namespace stabsens
