#include "eqf_rio/eval/metrics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace eqf_rio {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17) << header << '\n';
  return out;
}

}  // namespace

const char* to_string(Convergence c) {
  switch (c) {
    case Convergence::Converged: return "converged";
    case Convergence::Partial: return "partial";
    case Convergence::Fail: return "fail";
  }
  return "?";
}

AlignedPair associate(const std::vector<PoseSample>& truth, const std::vector<PoseSample>& estimate,
                      const std::vector<Matrix6d>& covariance, double tol) {
  if (!covariance.empty() && covariance.size() != estimate.size()) {
    throw std::invalid_argument("covariance count does not match estimate count");
  }
  AlignedPair pair;
  if (truth.empty()) throw std::invalid_argument("no overlapping timestamps");
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double t = estimate[i].t;
    auto it = std::lower_bound(truth.begin(), truth.end(), t,
                               [](const PoseSample& s, double value) { return s.t < value; });
    const PoseSample* best = nullptr;
    if (it != truth.end()) best = &*it;
    if (it != truth.begin()) {
      const PoseSample* prev = &*(it - 1);
      if (!best || std::abs(prev->t - t) <= std::abs(best->t - t)) best = prev;
    }
    if (!best || std::abs(best->t - t) > tol) continue;
    pair.t.push_back(t);
    pair.truth.push_back(*best);
    pair.estimate.push_back(estimate[i]);
    if (!covariance.empty()) pair.covariance.push_back(covariance[i]);
  }
  if (pair.t.empty()) throw std::invalid_argument("no overlapping timestamps");
  return pair;
}

std::vector<ApeSample> ape(const AlignedPair& pair) {
  if (pair.size() == 0) throw std::invalid_argument("ape: empty input");
  std::vector<ApeSample> out(pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const SO3& R = pair.truth[i].R;
    const SO3 dR = R.inverse() * pair.estimate[i].R;
    // log is undefined at exactly pi; fall back to the angle along a valid axis.
    try {
      out[i].rotation = dR.log();
    } catch (const LogDomainError&) {
      const Eigen::AngleAxisd aa(dR.matrix());
      out[i].rotation = aa.axis() * aa.angle();
    }
    out[i].translation = R.matrix().transpose() * (pair.estimate[i].p - pair.truth[i].p);
  }
  return out;
}

double rmse(const std::vector<Vector3d>& errors) {
  if (errors.empty()) throw std::invalid_argument("rmse: empty input");
  double sum = 0.0;
  for (const Vector3d& e : errors) sum += e.squaredNorm();
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

double anees(const AlignedPair& pair) {
  if (pair.covariance.size() != pair.size() || pair.size() == 0) {
    throw std::invalid_argument("anees: covariances required for every pose");
  }
  const std::vector<ApeSample> errors = ape(pair);
  double sum = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    Vector6d e;
    e << errors[i].rotation, errors[i].translation;
    const Eigen::LDLT<Matrix6d> ldlt(pair.covariance[i]);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-15)) {
      throw std::domain_error("anees: singular pose covariance at t=" + std::to_string(pair.t[i]));
    }
    sum += e.dot(ldlt.solve(e));
  }
  return sum / (6.0 * static_cast<double>(pair.size()));
}

double path_length(const std::vector<PoseSample>& poses) {
  double length = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) length += (poses[i].p - poses[i - 1].p).norm();
  return length;
}

std::pair<double, double> drift(const AlignedPair& pair, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("drift: trajectory length must be positive");
  if (pair.size() == 0) throw std::invalid_argument("drift: empty input");
  const std::size_t last = pair.size() - 1;
  const SO3& R = pair.truth[last].R;
  const double position = (R.matrix().transpose() * (pair.estimate[last].p - pair.truth[last].p)).norm();
  const Matrix3d M = pair.estimate[last].R.matrix() * R.matrix().transpose();
  const double yaw = std::abs(std::atan2(M(1, 0), M(0, 0)));
  return {100.0 * position / length, yaw * kRadToDeg / length};
}

double calibration_error(const SO3& S_true, const SO3& S_hat) { return (S_true.inverse() * S_hat).angle(); }

Convergence classify_convergence(const std::vector<double>& errors, double threshold) {
  if (errors.empty()) return Convergence::Fail;
  const std::size_t n = errors.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  bool settled = true;
  for (std::size_t i = n - tail; i < n; ++i) settled = settled && errors[i] < threshold;
  if (settled) return Convergence::Converged;
  return errors.back() < errors.front() ? Convergence::Partial : Convergence::Fail;
}

Matrix6d ape_covariance(const SE23& T_hat, const Matrix6d& Sigma_rot_pos) {
  const Matrix3d Rt = T_hat.rotation().matrix().transpose();
  Matrix6d M = Matrix6d::Zero();
  M.block<3, 3>(0, 0) = -Rt;
  M.block<3, 3>(3, 0) = Rt * skew(T_hat.position());
  M.block<3, 3>(3, 3) = -Rt;
  return M * Sigma_rot_pos * M.transpose();
}

MetricsReport evaluate_metrics(const AlignedPair& pair) {
  MetricsReport report;
  const std::vector<ApeSample> errors = ape(pair);
  std::vector<Vector3d> rot, trans;
  for (const ApeSample& e : errors) {
    rot.push_back(e.rotation);
    trans.push_back(e.translation);
  }
  report.translation_rmse = rmse(trans);
  report.rotation_rmse_deg = rmse(rot) * kRadToDeg;
  report.trajectory_length = path_length(pair.truth);
  if (report.trajectory_length > 0.0) {
    const auto [pos, yaw] = drift(pair, report.trajectory_length);
    report.position_drift_cm_per_m = pos;
    report.yaw_drift_deg_per_m = yaw;
  }
  if (pair.covariance.size() == pair.size()) report.anees = anees(pair);
  return report;
}

void emit_plot_data(const AlignedPair& pair, const MetricsReport& report, const std::string& dir) {
  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  std::ofstream traj = open_csv(base / "trajectory.csv", "t,gt_x,gt_y,gt_z,est_x,est_y,est_z");
  std::ofstream apef = open_csv(base / "ape.csv", "t,rot_x,rot_y,rot_z,trans_x,trans_y,trans_z,rot_norm_deg,trans_norm");
  std::ofstream nees = open_csv(base / "anees.csv", "t,nees");
  std::ofstream calib = open_csv(base / "calib.csv", "t,e_angle_deg");

  const std::vector<ApeSample> errors = pair.size() > 0 ? ape(pair) : std::vector<ApeSample>{};
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const Vector3d& g = pair.truth[i].p;
    const Vector3d& e = pair.estimate[i].p;
    traj << pair.t[i] << ',' << g.x() << ',' << g.y() << ',' << g.z() << ',' << e.x() << ',' << e.y() << ','
         << e.z() << '\n';
    const ApeSample& a = errors[i];
    apef << pair.t[i] << ',' << a.rotation.x() << ',' << a.rotation.y() << ',' << a.rotation.z() << ','
         << a.translation.x() << ',' << a.translation.y() << ',' << a.translation.z() << ','
         << a.rotation.norm() * kRadToDeg << ',' << a.translation.norm() << '\n';
    if (pair.covariance.size() == pair.size()) {
      Vector6d v;
      v << a.rotation, a.translation;
      nees << pair.t[i] << ',' << v.dot(pair.covariance[i].ldlt().solve(v)) / 6.0 << '\n';
    }
  }
  for (std::size_t i = 0; i < report.calib_error.size(); ++i) {
    calib << report.calib_time[i] << ',' << report.calib_error[i] * kRadToDeg << '\n';
  }
}

}  // namespace eqf_rio
