#include "certalign/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace certalign::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::MaxIterations: return "MaxIterations";
    case Status::NumericalFailure: return "NumericalFailure";
    case Status::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

double Solution::accuracy() const {
  return std::max({gap, primal_residual, dual_residual, complementarity});
}

namespace {

constexpr double kStepFraction = 0.98;
constexpr int kStallLimit = 10;

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void validate(const Problem& p, const Options& opts) {
  if (!(opts.tol >= 1e-12 && opts.tol <= 1e-4)) throw std::invalid_argument("sdp: tol must lie in [1e-12, 1e-4]");
  if (opts.max_iter < 1) throw std::invalid_argument("sdp: max_iter must be positive");
  const Eigen::Index n = p.c.rows();
  if (n < 1 || p.c.cols() != n) throw std::invalid_argument("sdp: C must be square and non-empty");
  if (p.constraints.empty()) throw std::invalid_argument("sdp: constraint list is empty");
  auto symmetric = [](const MatrixXd& m) {
    return m.allFinite() && (m - m.transpose()).norm() <= 1e-12 * (1.0 + m.norm());
  };
  if (!symmetric(p.c)) throw std::invalid_argument("sdp: C is not symmetric");
  for (const Constraint& con : p.constraints) {
    if (con.a.rows() != n || con.a.cols() != n) throw std::invalid_argument("sdp: constraint dimension mismatch");
    if (!symmetric(con.a)) throw std::invalid_argument("sdp: constraint matrix is not symmetric");
    if (!std::isfinite(con.b)) throw std::invalid_argument("sdp: non-finite right-hand side");
  }
}

// Working problem after dependent-row removal and row scaling.
struct Reduced {
  std::vector<int> kept;   // original index of each working constraint
  std::vector<double> scale;  // working A_i = original A_i * scale_i
  std::vector<MatrixXd> a;
  VectorXd b;
  std::vector<int> dropped;
  bool inconsistent = false;
};

Reduced preprocess(const Problem& p) {
  const Eigen::Index n = p.c.rows();
  const int m = p.num_constraints();
  MatrixXd g(n * n, m);
  VectorXd b(m);
  std::vector<double> scale(m);
  for (int i = 0; i < m; ++i) {
    const double norm = p.constraints[i].a.norm();
    scale[i] = norm > 0.0 ? 1.0 / norm : 1.0;
    g.col(i) = Eigen::Map<const VectorXd>(p.constraints[i].a.data(), n * n) * scale[i];
    b(i) = p.constraints[i].b * scale[i];
  }

  Reduced r;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(g);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  std::vector<int> independent;
  for (Eigen::Index k = 0; k < rank; ++k) independent.push_back(qr.colsPermutation().indices()(k));
  std::sort(independent.begin(), independent.end());

  std::vector<bool> is_kept(m, false);
  for (int i : independent) is_kept[i] = true;
  for (int i = 0; i < m; ++i) {
    if (!is_kept[i]) r.dropped.push_back(i);
  }

  if (!r.dropped.empty()) {
    MatrixXd gi(n * n, independent.size());
    VectorXd bi(independent.size());
    for (std::size_t k = 0; k < independent.size(); ++k) {
      gi.col(k) = g.col(independent[k]);
      bi(k) = b(independent[k]);
    }
    const auto solver = gi.colPivHouseholderQr();
    for (int d : r.dropped) {
      const VectorXd coeff = solver.solve(g.col(d));
      if (std::abs(coeff.dot(bi) - b(d)) > 1e-8 * (1.0 + std::abs(b(d)) + bi.norm())) r.inconsistent = true;
    }
  }

  r.kept = independent;
  r.b.resize(independent.size());
  for (std::size_t k = 0; k < independent.size(); ++k) {
    const int i = independent[k];
    r.scale.push_back(scale[i]);
    r.a.push_back(p.constraints[i].a * scale[i]);
    r.b(k) = b(i);
  }
  return r;
}

struct Direction {
  MatrixXd dx;
  VectorXd dy;
  MatrixXd ds;
  MatrixXd dx_t;  // NT-scaled
  MatrixXd ds_t;
};

}  // namespace

Solution solve(const Problem& problem, const Options& opts) {
  validate(problem, opts);
  const Eigen::Index n = problem.c.rows();
  const int m_orig = problem.num_constraints();
  const MatrixXd& c = problem.c;
  const double c_norm = c.norm();

  Solution sol;
  const Reduced red = preprocess(problem);
  sol.dropped_constraints = red.dropped;
  const std::vector<MatrixXd>& a = red.a;
  const VectorXd& b = red.b;
  const int m = static_cast<int>(a.size());

  auto apply_a = [&](const MatrixXd& z) {
    VectorXd out(m);
    for (int i = 0; i < m; ++i) out(i) = inner(a[i], z);
    return out;
  };
  auto apply_at = [&](const VectorXd& y) {
    MatrixXd out = MatrixXd::Zero(n, n);
    for (int i = 0; i < m; ++i) out += y(i) * a[i];
    return out;
  };

  // Gram matrix of the working constraints, used to restore A(dX) = r_p in each direction.
  MatrixXd gram(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) gram(i, j) = gram(j, i) = inner(a[i], a[j]);
  }
  const Eigen::LLT<MatrixXd> gram_llt(gram);

  double b_max = 0.0;
  for (const auto& con : problem.constraints) b_max = std::max(b_max, std::abs(con.b));
  const double tau = 1.0 + c_norm + b_max;
  MatrixXd x = tau * MatrixXd::Identity(n, n);
  MatrixXd s = tau * MatrixXd::Identity(n, n);
  VectorXd y = VectorXd::Zero(m);

  auto finish = [&](Status status, int iterations) {
    sol.status = status;
    sol.iterations = iterations;
    sol.x = sym(x);
    sol.s = sym(s);
    sol.y = VectorXd::Zero(m_orig);
    for (int k = 0; k < m; ++k) sol.y(red.kept[k]) = y(k) * red.scale[k];
    VectorXd rp(m_orig);
    VectorXd b_orig(m_orig);
    MatrixXd aty = MatrixXd::Zero(n, n);
    for (int i = 0; i < m_orig; ++i) {
      const Constraint& con = problem.constraints[i];
      b_orig(i) = con.b;
      rp(i) = con.b - inner(con.a, sol.x);
      aty += sol.y(i) * con.a;
    }
    sol.primal_objective = inner(c, sol.x);
    sol.dual_objective = b_orig.dot(sol.y);
    sol.gap = std::abs(sol.primal_objective - sol.dual_objective) / (1.0 + std::abs(sol.primal_objective));
    sol.primal_residual = rp.norm() / (1.0 + b_orig.norm());
    sol.dual_residual = (c - aty - sol.s).norm() / (1.0 + c_norm);
    sol.complementarity = inner(sol.x, sol.s) / (1.0 + std::abs(sol.primal_objective));
    return sol;
  };

  if (red.inconsistent) return finish(Status::Infeasible, 0);

  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;
  const double b_norm = b.norm();

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    const VectorXd rp = b - apply_a(x);
    const MatrixXd rd = c - apply_at(y) - s;
    const double pobj = inner(c, x);
    const double dobj = b.dot(y);
    const double compl_xs = inner(x, s);
    const double mu = compl_xs / static_cast<double>(n);
    const double pres = rp.norm() / (1.0 + b_norm);
    const double dres = rd.norm() / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    const double rel_compl = compl_xs / (1.0 + std::abs(pobj));

    if (opts.record_history) sol.history.push_back({pobj, dobj, compl_xs, pres, dres});

    if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol && rel_compl <= opts.tol) {
      return finish(Status::Optimal, iter);
    }

    // Farkas-type certificates: sum y_i A_i <= 0 with b^T y > 0 (primal infeasible),
    // or A(X) ~ 0 with C.X < 0 (dual infeasible).
    if (dobj > 0.0 && iter > 0) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(apply_at(y / dobj), Eigen::EigenvaluesOnly);
      if (eig.eigenvalues()(n - 1) <= 1e-9) return finish(Status::Infeasible, iter);
    }
    if (pobj < 0.0 && iter > 0) {
      if ((b - rp).norm() / -pobj <= 1e-9) return finish(Status::Infeasible, iter);
    }

    const double merit = std::max({pres, dres, gap, rel_compl});
    if (merit < best_merit) {
      best_merit = merit;
      stall = 0;
    } else if (++stall >= kStallLimit) {
      return finish(Status::NumericalFailure, iter);
    }
    if (iter == opts.max_iter) break;

    // Nesterov-Todd scaling: G^T S G = G^-1 X G^-T = V = diag(v).
    Eigen::LLT<MatrixXd> chol_x(x);
    if (chol_x.info() != Eigen::Success) return finish(Status::NumericalFailure, iter);
    const MatrixXd l = chol_x.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym(l.transpose() * s * l));
    if (eig.info() != Eigen::Success || !(eig.eigenvalues()(0) > 0.0)) {
      return finish(Status::NumericalFailure, iter);
    }
    const VectorXd v = eig.eigenvalues().cwiseSqrt();
    const VectorXd q = v.cwiseSqrt();
    const MatrixXd g = l * eig.eigenvectors() * q.cwiseInverse().asDiagonal();
    const MatrixXd g_inv =
        q.asDiagonal() * eig.eigenvectors().transpose() * chol_x.matrixL().solve(MatrixXd::Identity(n, n));

    std::vector<MatrixXd> at(m);
    for (int i = 0; i < m; ++i) at[i] = g.transpose() * a[i] * g;
    // Schur complement M = B^T B with B = [vec(G^T A_i G)]; factored through QR of B for accuracy.
    MatrixXd stacked(n * n, m);
    for (int i = 0; i < m; ++i) stacked.col(i) = Eigen::Map<const VectorXd>(at[i].data(), n * n);
    const Eigen::HouseholderQR<MatrixXd> schur_qr(stacked);
    const MatrixXd r_factor = schur_qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    if (!r_factor.diagonal().allFinite() || r_factor.diagonal().cwiseAbs().minCoeff() == 0.0) {
      return finish(Status::NumericalFailure, iter);
    }
    const MatrixXd rd_t = g.transpose() * rd * g;

    // Solves V D + D V = r elementwise; D = scaled dX + scaled dS.
    auto lyapunov = [&](const MatrixXd& r) {
      MatrixXd out(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = r(i, j) / (v(i) + v(j));
      }
      return out;
    };
    auto direction = [&](const MatrixXd& rhs) {
      Direction d;
      const MatrixXd t = lyapunov(rhs);
      VectorXd r(m);
      for (int i = 0; i < m; ++i) r(i) = rp(i) - inner(at[i], t - rd_t);
      const VectorXd w = r_factor.transpose().triangularView<Eigen::Lower>().solve(r);
      d.dy = r_factor.triangularView<Eigen::Upper>().solve(w);
      MatrixXd ds_t = rd_t;
      for (int i = 0; i < m; ++i) ds_t -= d.dy(i) * at[i];
      d.dx = sym(g * (t - ds_t) * g.transpose());
      d.dx += apply_at(gram_llt.solve(rp - apply_a(d.dx)));
      d.ds = rd - apply_at(d.dy);
      d.dx_t = sym(g_inv * d.dx * g_inv.transpose());
      d.ds_t = sym(g.transpose() * d.ds * g);
      return d;
    };
    // Largest step keeping V + alpha * dm positive definite.
    auto max_step = [&](const MatrixXd& dm) {
      const VectorXd w = v.cwiseSqrt().cwiseInverse();
      Eigen::SelfAdjointEigenSolver<MatrixXd> e(w.asDiagonal() * dm * w.asDiagonal(), Eigen::EigenvaluesOnly);
      const double lmin = e.eigenvalues()(0);
      return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
    };

    const MatrixXd v2 = v.cwiseAbs2().asDiagonal();
    const Direction pred = direction(-2.0 * v2);
    const double ap_aff = std::min(1.0, max_step(pred.dx_t));
    const double ad_aff = std::min(1.0, max_step(pred.ds_t));
    const double mu_aff = inner(x + ap_aff * pred.dx, s + ad_aff * pred.ds) / static_cast<double>(n);
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2.0));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

    const MatrixXd cross = pred.dx_t * pred.ds_t;
    const MatrixXd rhs = 2.0 * sigma * mu * MatrixXd::Identity(n, n) - 2.0 * v2 - cross - cross.transpose();
    const Direction corr = direction(rhs);
    if (!corr.dx.allFinite() || !corr.ds.allFinite() || !corr.dy.allFinite()) {
      return finish(Status::NumericalFailure, iter);
    }
    const double fraction = std::min(kStepFraction, 0.9 + 0.09 * std::min(ap_aff, ad_aff));
    double ap = std::min(1.0, fraction * max_step(corr.dx_t));
    double ad = std::min(1.0, fraction * max_step(corr.ds_t));

    // Once feasible, take a common step (the gap then decreases to first order) and
    // backtrack until it does not grow.
    const bool feasible = pres <= 10.0 * opts.tol && dres <= 10.0 * opts.tol;
    if (feasible) ap = ad = std::min(ap, ad);
    const double gap_now = feasible ? pobj - dobj : std::numeric_limits<double>::infinity();
    const double slack = 10.0 * opts.tol * (1.0 + std::abs(pobj));
    double shrink = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, shrink *= 0.5) {
      const double gap_new = inner(c, x + shrink * ap * corr.dx) - b.dot(y + shrink * ad * corr.dy);
      if (gap_new <= gap_now + slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish(Status::NumericalFailure, iter);
    x += shrink * ap * corr.dx;
    y += shrink * ad * corr.dy;
    s += shrink * ad * corr.ds;
  }
  return finish(Status::MaxIterations, opts.max_iter);
}

void write_problem(std::ostream& os, const Problem& p) {
  const auto old_precision = os.precision(17);
  os << p.dim() << ' ' << p.num_constraints() << '\n';
  auto dump = [&](const MatrixXd& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index col = 0; col < mat.cols(); ++col) os << (col ? " " : "") << mat(r, col);
      os << '\n';
    }
  };
  dump(p.c);
  for (const Constraint& con : p.constraints) {
    os << con.b << '\n';
    dump(con.a);
  }
  os.precision(old_precision);
}

Problem read_problem(std::istream& is) {
  int n = 0;
  int m = 0;
  if (!(is >> n >> m) || n < 1 || m < 0) throw std::runtime_error("sdp: bad problem header");
  auto read_matrix = [&]() {
    MatrixXd mat(n, n);
    for (int r = 0; r < n; ++r) {
      for (int col = 0; col < n; ++col) {
        if (!(is >> mat(r, col))) throw std::runtime_error("sdp: truncated matrix");
      }
    }
    return mat;
  };
  Problem p;
  p.c = read_matrix();
  for (int i = 0; i < m; ++i) {
    Constraint con;
    if (!(is >> con.b)) throw std::runtime_error("sdp: truncated constraint");
    con.a = read_matrix();
    p.constraints.push_back(std::move(con));
  }
  return p;
}

}  // namespace certalign::sdp
