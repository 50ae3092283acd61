#include "certalign/qcqp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace certalign {

namespace {

constexpr int kY = 9;

// Index of R(row, col) inside x = [vec(R); y].
constexpr int idx(int row, int col) { return 3 * col + row; }

void add_bilinear(Mat10& a, int p, int q, double coeff) {
  a(p, q) += 0.5 * coeff;
  a(q, p) += 0.5 * coeff;
}

}  // namespace

CostAssembly assemble_cost(std::span<const ReducedMeasurement> meas) {
  if (meas.empty()) throw Error(Errc::EmptyBatch, "no measurements");
  CostAssembly out;
  CostBlocks& b = out.blocks;
  for (const ReducedMeasurement& m : meas) {
    Vec10 row;
    row.head<9>() = m.m;
    row(kY) = -m.d_bar;
    b.q_tt += m.weight;
    b.q_tr += m.weight * row;
    b.q_rr += m.weight * row * row.transpose();
  }
  b.count = meas.size();
  out.q_bar = b.q_rr - b.q_tr * b.q_tr.transpose() / b.q_tt;
  out.q_bar = 0.5 * (out.q_bar + out.q_bar.transpose()).eval();
  return out;
}

double full_cost(const CostBlocks& blocks, double t, const Vec10& x) {
  return blocks.q_tt * t * t + 2.0 * t * blocks.q_tr.dot(x) + x.dot(blocks.q_rr * x);
}

ClockDrift recover_clock_drift(const CostBlocks& blocks, const Vec10& x) {
  return ClockDrift{-blocks.q_tr.dot(x) / blocks.q_tt};
}

Vec10 homogenize(const Rotation& r) {
  Vec10 x;
  x.head<9>() = vec(r.matrix());
  x(kY) = 1.0;
  return x;
}

double ConstraintSet::max_violation(const Vec10& x) const {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, std::abs(c.value(x)));
  return worst;
}

ConstraintSet so3_constraints(bool redundant) {
  ConstraintSet set;
  set.redundant = redundant;

  // R^T R = y^2 I: inner products of columns j and k.
  for (int j = 0; j < 3; ++j) {
    for (int k = j; k < 3; ++k) {
      QuadraticConstraint c;
      for (int i = 0; i < 3; ++i) add_bilinear(c.a, idx(i, j), idx(i, k), 1.0);
      if (j == k) c.a(kY, kY) = -1.0;
      c.label = "col" + std::to_string(j) + std::to_string(k);
      set.constraints.push_back(std::move(c));
    }
  }

  if (redundant) {
    // R R^T = y^2 I: inner products of rows i and l.
    for (int i = 0; i < 3; ++i) {
      for (int l = i; l < 3; ++l) {
        QuadraticConstraint c;
        for (int j = 0; j < 3; ++j) add_bilinear(c.a, idx(i, j), idx(l, j), 1.0);
        if (i == l) c.a(kY, kY) = -1.0;
        c.label = "row" + std::to_string(i) + std::to_string(l);
        set.constraints.push_back(std::move(c));
      }
    }
    // Column handedness: c_i x c_j = y c_k for cyclic (i, j, k).
    constexpr std::array<std::array<int, 3>, 3> cyc{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
    for (const auto& [ci, cj, ck] : cyc) {
      for (const auto& [a, b, c3] : cyc) {
        QuadraticConstraint c;
        // (c_i x c_j)_a = c_i[b] c_j[c] - c_i[c] c_j[b]
        add_bilinear(c.a, idx(b, ci), idx(c3, cj), 1.0);
        add_bilinear(c.a, idx(c3, ci), idx(b, cj), -1.0);
        add_bilinear(c.a, kY, idx(a, ck), -1.0);
        c.label = "hand" + std::to_string(ck) + std::to_string(a);
        set.constraints.push_back(std::move(c));
      }
    }
  }

  QuadraticConstraint homog;
  homog.a(kY, kY) = 1.0;
  homog.d = 1.0;
  homog.label = "homog";
  set.constraints.push_back(std::move(homog));
  return set;
}

int numerical_rank(const Eigen::VectorXd& sv, std::size_t samples, const ObservabilityOptions& opts) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  double threshold;
  if (opts.mode == RankMode::Exact) {
    threshold = static_cast<double>(std::max<std::size_t>(samples, 9)) *
                std::numeric_limits<double>::epsilon() * sv(0);
  } else {
    threshold = opts.relative_threshold * sv(0);
  }
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return rank;
}

ObservabilityReport observability(const Eigen::Matrix3Xd& v, const Eigen::Matrix3Xd& n,
                                  const ObservabilityOptions& opts) {
  if (v.cols() == 0) throw Error(Errc::EmptyBatch, "no measurements");
  if (v.cols() != n.cols()) throw Error(Errc::InvalidArgument, "V and N column counts differ");
  const auto k = static_cast<std::size_t>(v.cols());
  Eigen::Matrix<double, 9, Eigen::Dynamic> m(9, v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) m.col(i) = kron(v.col(i), n.col(i));

  ObservabilityReport r;
  r.measurements = k;
  r.singular_values_v = Eigen::JacobiSVD<Eigen::MatrixXd>(v).singularValues();
  r.singular_values_n = Eigen::JacobiSVD<Eigen::MatrixXd>(n).singularValues();
  r.singular_values_m = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  r.rank_v = numerical_rank(r.singular_values_v, k, opts);
  r.rank_n = numerical_rank(r.singular_values_n, k, opts);
  r.rank_m = numerical_rank(r.singular_values_m, k, opts);
  r.observable_redundant = r.rank_v >= 2 && r.rank_n >= 2 && r.rank_m >= 3;
  r.observable_minimal = r.rank_v == 3 && r.rank_n == 3 && r.rank_m >= 9;
  return r;
}

ObservabilityReport observability(std::span<const Epoch> epochs, const ObservabilityOptions& opts) {
  const std::size_t k = observation_count(epochs);
  if (k == 0) throw Error(Errc::EmptyBatch, "no measurements");
  Eigen::Matrix3Xd v(3, k);
  Eigen::Matrix3Xd n(3, k);
  Eigen::Index col = 0;
  for (const Epoch& e : epochs) {
    for (const Observation& obs : e.observations) {
      v.col(col) = e.body_velocity;
      n.col(col) = line_of_sight(e.receiver_pos, obs.sat.pos);
      ++col;
    }
  }
  return observability(v, n, opts);
}

}  // namespace certalign
