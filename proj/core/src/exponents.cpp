#include "carnot/exponents.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "carnot/parallel.hpp"
#include "carnot/rng.hpp"
#include "det.hpp"

namespace carnot {

namespace {

// Orthonormal column basis of the span of m (columns), singular values
// against rank_tol relative to the largest. Also tracks how close the rank
// decision came to the threshold.
struct RankedBasis {
  Eigen::MatrixXd basis;
  double margin = std::numeric_limits<double>::infinity();
};

RankedBasis column_space(const Eigen::MatrixXd& m, double rank_tol) {
  RankedBasis out;
  if (m.cols() == 0 || m.norm() == 0.0) {
    out.basis = Eigen::MatrixXd::Zero(m.rows(), 0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = rank_tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) {
      ++rank;
      out.margin = std::min(out.margin, sv(i) / cut);
    } else if (sv(i) > 0.0) {
      out.margin = std::min(out.margin, cut / sv(i));
    }
  }
  out.basis = svd.matrixU().leftCols(rank);
  return out;
}

// Orthonormal basis of the null space of m (acting on the right: m v = 0).
RankedBasis null_space(const Eigen::MatrixXd& m, double rank_tol, int ambient) {
  RankedBasis out;
  if (m.rows() == 0 || m.norm() == 0.0) {
    out.basis = Eigen::MatrixXd::Identity(ambient, ambient);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = rank_tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) {
      ++rank;
      out.margin = std::min(out.margin, sv(i) / cut);
    } else if (sv(i) > 0.0) {
      out.margin = std::min(out.margin, cut / sv(i));
    }
  }
  out.basis = svd.matrixV().rightCols(ambient - rank);
  return out;
}

// Stacks the maps nu -> J_nu q over the columns q of basis, one q1 x q2
// block per column; the null space of the stack is the annihilator.
Eigen::MatrixXd annihilator_stack(const StepTwoAlgebra& alg,
                                  const Eigen::MatrixXd& basis) {
  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  Eigen::MatrixXd stack(basis.cols() * q1, q2);
  for (int c = 0; c < basis.cols(); ++c)
    for (int a = 0; a < q2; ++a)
      stack.block(c * q1, a, q1, 1) =
          alg.layer_map(a).transpose() * basis.col(c);
  return stack;
}

double lfact(int n) { return std::tgamma(n + 1.0); }

}  // namespace

Filtration filtration(const StepTwoAlgebra& alg, const Covector& cov,
                      double rank_tol) {
  require_covector(alg, cov, "filtration");
  if (!(rank_tol > 0.0)) throw input_error("filtration: rank_tol must be positive");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);

  // Krylov vectors, normalized so rank decisions are scale-free.
  std::vector<Eigen::VectorXd> w;
  w.push_back(cov.xi);
  for (int i = 1; i <= q1; ++i) w.push_back(j * w.back());

  Filtration out;
  out.krylov_dims.push_back(0);

  double margin = std::numeric_limits<double>::infinity();
  std::vector<Eigen::MatrixXd> chain_bases;  // basis of U^l per l >= 1
  int stab = -1;
  for (int l = 1; l <= q1 + 1; ++l) {
    Eigen::MatrixXd cols(q1, l);
    for (int i = 0; i < l; ++i) {
      const double nm = w[i].norm();
      cols.col(i) = nm > 0.0 ? Eigen::VectorXd(w[i] / nm)
                             : Eigen::VectorXd::Zero(q1);
    }
    RankedBasis rb = column_space(cols, rank_tol);
    margin = std::min(margin, rb.margin);
    out.krylov_dims.push_back(static_cast<int>(rb.basis.cols()));
    chain_bases.push_back(rb.basis);
    const int len = static_cast<int>(out.krylov_dims.size());
    if (out.krylov_dims[len - 1] == out.krylov_dims[len - 2]) {
      stab = len - 2;  // first l with U^l = U^{l+1}
      break;
    }
  }
  if (stab < 0)
    throw internal_error("filtration: Krylov chain failed to stabilize");

  // Annihilators U_l for l = 0..stab; U_stab is the stable one.
  std::vector<Eigen::MatrixXd> ann;
  ann.push_back(Eigen::MatrixXd::Identity(q2, q2));
  for (int l = 1; l <= stab; ++l) {
    RankedBasis nb =
        null_space(annihilator_stack(alg, chain_bases[l - 1]), rank_tol, q2);
    margin = std::min(margin, nb.margin);
    ann.push_back(nb.basis);
  }

  out.w_inf_dim = static_cast<int>(ann[stab].cols());
  out.w_inf_basis = ann[stab];

  // W_l = orthogonal complement of U_{l+1} inside U_l. Directions of W_l
  // survive the projection with unit singular value, the rest collapse, so
  // the cut sits at the absolute gap 0.5.
  for (int l = 0; l < stab; ++l) {
    const Eigen::MatrixXd& big = ann[l];
    const Eigen::MatrixXd& small = ann[l + 1];
    const int want =
        static_cast<int>(big.cols()) - static_cast<int>(small.cols());
    if (want < 0)
      throw internal_error("filtration: annihilator chain not nested");
    Eigen::MatrixXd basis(q2, 0);
    if (want > 0) {
      Eigen::MatrixXd proj = big;
      if (small.cols() > 0) proj -= small * (small.transpose() * big);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeThinU);
      int got = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 0.5) ++got;
      if (got != want)
        throw internal_error("filtration: splitting dimension mismatch");
      basis = svd.matrixU().leftCols(want);
    }
    out.w_dims.push_back(want);
    out.w_bases.push_back(basis);
    if (want > 0) out.depth = l;
  }

  long order2 = 0;
  for (std::size_t l = 0; l < out.w_dims.size(); ++l)
    order2 += 2L * static_cast<long>(l) * out.w_dims[l];
  out.order = out.w_inf_dim > 0 ? JacOrder::infinite()
                                : JacOrder::finite(static_cast<int>(order2));

  out.rank_margin = margin;
  out.borderline = margin < 10.0;
  return out;
}

JacOrder vanishing_order(const StepTwoAlgebra& alg, const Covector& cov,
                         double rank_tol) {
  return filtration(alg, cov, rank_tol).order;
}

ScalingLimit scaling_limit_matrix(const StepTwoAlgebra& alg, const Covector& cov,
                                  double rank_tol) {
  const Filtration f = filtration(alg, cov, rank_tol);
  if (f.w_inf_dim > 0)
    throw degenerate_covector_error(
        "scaling_limit_matrix: stable annihilator is nontrivial");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();
  const int blocks = static_cast<int>(f.w_dims.size());

  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);
  std::vector<Eigen::VectorXd> w(blocks + 1);
  w[0] = cov.xi;
  for (int l = 1; l <= blocks; ++l) w[l] = j * w[l - 1];

  // Column offsets of each W_l inside the second-layer part.
  std::vector<int> offset(blocks, 0);
  for (int l = 1; l < blocks; ++l) offset[l] = offset[l - 1] + f.w_dims[l - 1];

  ScalingLimit out;
  out.matrix = Eigen::MatrixXd::Zero(q1 + q2, q1 + q2);
  out.matrix.topLeftCorner(q1, q1).setIdentity();

  for (int l = 0; l < blocks; ++l) {
    const Eigen::MatrixXd& wb = f.w_bases[l];
    if (wb.cols() == 0) continue;
    const int off = q1 + offset[l];

    // Row block W_l, columns V1: l/(2 (l+2)!) <wb, [e_i, w_l]>.
    if (l > 0) {
      const double cf = l / (2.0 * lfact(l + 2));
      for (int i = 0; i < q1; ++i) {
        const Eigen::VectorXd br =
            bracket(alg, Eigen::VectorXd::Unit(q1, i), w[l]);
        out.matrix.block(off, i, wb.cols(), 1) = cf * (wb.transpose() * br);
      }
    }

    // Column block W_l, rows V1: 1/(l+2)! J_nu w_l.
    const double cf2 = 1.0 / lfact(l + 2);
    for (int c = 0; c < wb.cols(); ++c)
      out.matrix.block(0, off + c, q1, 1) =
          cf2 * (j_map_matrix(alg, wb.col(c)) * w[l]);

    // Mixed second-layer blocks, rows W_s, columns W_l(=r):
    // (s - r - 1) / (2 (r+s+3) (r+2)! (s+1)!) <basis_s, [J_nu w_r, w_s]>.
    for (int sblk = 0; sblk < blocks; ++sblk) {
      const Eigen::MatrixXd& sb = f.w_bases[sblk];
      if (sb.cols() == 0) continue;
      const double cf3 = (sblk - l - 1.0) /
                         (2.0 * (l + sblk + 3.0) * lfact(l + 2) * lfact(sblk + 1));
      for (int c = 0; c < wb.cols(); ++c) {
        const Eigen::VectorXd jv = j_map_matrix(alg, wb.col(c)) * w[l];
        const Eigen::VectorXd br = bracket(alg, jv, w[sblk]);
        out.matrix.block(q1 + offset[sblk], off + c, sb.cols(), 1) =
            cf3 * (sb.transpose() * br);
      }
    }
  }

  out.det = detail::graded_determinant(out.matrix);
  return out;
}

HilbertGram hilbert_gram(const StepTwoAlgebra& alg, const Covector& cov,
                         double rank_tol) {
  const Filtration f = filtration(alg, cov, rank_tol);
  if (f.w_inf_dim > 0)
    throw degenerate_covector_error("hilbert_gram: stable annihilator is nontrivial");

  const int q2 = alg.v2_dim();
  const int blocks = static_cast<int>(f.w_dims.size());
  const Eigen::MatrixXd j = j_map_matrix(alg, cov.mu);
  std::vector<Eigen::VectorXd> w(blocks + 1);
  w[0] = cov.xi;
  for (int l = 1; l <= blocks; ++l) w[l] = j * w[l - 1];

  std::vector<int> offset(blocks, 0);
  for (int l = 1; l < blocks; ++l) offset[l] = offset[l - 1] + f.w_dims[l - 1];

  HilbertGram out;
  out.matrix = Eigen::MatrixXd::Zero(q2, q2);
  for (int rblk = 0; rblk < blocks; ++rblk) {
    const Eigen::MatrixXd& rb = f.w_bases[rblk];
    for (int sblk = 0; sblk < blocks; ++sblk) {
      const Eigen::MatrixXd& sb = f.w_bases[sblk];
      if (rb.cols() == 0 || sb.cols() == 0) continue;
      for (int c = 0; c < rb.cols(); ++c) {
        // M^r_s(nu) = -pi_s [J_nu w_r, w_s], scaled by the Hilbert weight.
        const Eigen::VectorXd jv = j_map_matrix(alg, rb.col(c)) * w[rblk];
        const Eigen::VectorXd br = bracket(alg, jv, w[sblk]);
        out.matrix.block(offset[sblk], offset[rblk] + c, sb.cols(), 1) =
            -(sb.transpose() * br) / (rblk + sblk + 3.0);
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

std::vector<StratumMask> default_strata(const StepTwoAlgebra& alg) {
  std::vector<std::vector<int>> blocks = alg.v1_blocks();
  if (blocks.empty()) {
    if (alg.v1_dim() <= 12)
      for (int i = 0; i < alg.v1_dim(); ++i) blocks.push_back({i});
    else
      blocks = {};
  }

  std::vector<StratumMask> out;
  const int nb = static_cast<int>(blocks.size());
  if (nb > 0 && nb <= 12) {
    // All zero-patterns over the blocks; the empty pattern is full support.
    for (unsigned long pat = 0; pat < (1UL << nb); ++pat) {
      StratumMask m;
      for (int b = 0; b < nb; ++b)
        if (pat & (1UL << b))
          m.zero_xi.insert(m.zero_xi.end(), blocks[b].begin(), blocks[b].end());
      out.push_back(std::move(m));
    }
  } else {
    out.push_back({});  // full support
    for (int b = 0; b < nb; ++b) {
      StratumMask zero_one, keep_one;
      for (int bb = 0; bb < nb; ++bb) {
        auto& target = (bb == b) ? zero_one : keep_one;
        target.zero_xi.insert(target.zero_xi.end(), blocks[bb].begin(),
                              blocks[bb].end());
      }
      out.push_back(std::move(zero_one));
      out.push_back(std::move(keep_one));
    }
  }
  return out;
}

ExponentReport group_exponents(const StepTwoAlgebra& alg, long n_samples,
                               const std::vector<StratumMask>& strata,
                               std::uint64_t seed, unsigned workers,
                               double rank_tol) {
  if (n_samples < 1) throw input_error("group_exponents: need at least one sample");

  const int q1 = alg.v1_dim();
  const int q2 = alg.v2_dim();

  // Sample plan: n_samples plain Gaussians, then a fixed number per stratum.
  const long per_stratum = std::max<long>(8, n_samples / 32);
  struct Draw {
    const StratumMask* mask;  // null for plain Gaussian
  };
  std::vector<Draw> plan(n_samples, Draw{nullptr});
  for (const auto& m : strata)
    for (long i = 0; i < per_stratum; ++i) plan.push_back(Draw{&m});

  std::vector<JacOrder> orders(plan.size(), JacOrder::infinite());
  std::vector<Covector> covs(plan.size());

  parallel_for(plan.size(), workers, [&](std::size_t idx) {
    SampleStream rng(seed, idx);
    Covector cov{Eigen::VectorXd(q1), Eigen::VectorXd(q2)};
    for (int i = 0; i < q1; ++i) cov.xi(i) = rng.gaussian();
    for (int a = 0; a < q2; ++a) cov.mu(a) = rng.gaussian();
    if (plan[idx].mask) {
      for (int i : plan[idx].mask->zero_xi) cov.xi(i) = 0.0;
      for (int a : plan[idx].mask->zero_mu) cov.mu(a) = 0.0;
    }
    orders[idx] = vanishing_order(alg, cov, rank_tol);
    covs[idx] = std::move(cov);
  });

  std::size_t best_min = plan.size(), best_max = plan.size();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!orders[i].is_finite()) continue;
    if (best_min == plan.size() || orders[i] < orders[best_min]) best_min = i;
    if (best_max == plan.size() || orders[best_max] < orders[i]) best_max = i;
  }
  if (best_min == plan.size())
    throw input_error("group_exponents: every sample degenerate; pathological sampling");

  ExponentReport rep;
  rep.n = alg.dim();
  rep.q_hom = alg.homogeneous_dim();
  rep.min_order = orders[best_min].value();
  rep.max_finite_order = orders[best_max].value();
  rep.geodesic_dim = 2 * rep.q_hom - rep.n + rep.min_order;
  rep.curvature_exp_lower = 2 * rep.q_hom - rep.n + rep.max_finite_order;
  rep.curvature_exp_exact = false;
  rep.witness_min = covs[best_min];
  rep.witness_max = covs[best_max];
  rep.sample_count = static_cast<long>(plan.size());
  rep.seed = seed;
  std::ostringstream prov;
  prov << "sampled(n=" << plan.size() << ",strata=" << strata.size()
       << ",seed=" << seed << ")";
  rep.provenance = prov.str();
  return rep;
}

}  // namespace carnot
