#include "eqf_rio/sim/simulator.hpp"

#include <cmath>
#include <random>

namespace eqf_rio {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Sinusoid {
  Vector3d value, rate, accel;
};

Sinusoid evaluate(const Vector3d& amp, const Vector3d& freq, const Vector3d& phase, double t) {
  Sinusoid s;
  for (int i = 0; i < 3; ++i) {
    const double w = kTwoPi * freq(i);
    const double arg = w * t + phase(i);
    s.value(i) = amp(i) * std::sin(arg);
    s.rate(i) = amp(i) * w * std::cos(arg);
    s.accel(i) = -amp(i) * w * w * std::sin(arg);
  }
  return s;
}

bool nonnegative(const Vector3d& v) { return (v.array() >= 0.0).all(); }

}  // namespace

TrajectorySpec TrajectorySpec::from_preset(const std::string& name, double duration) {
  TrajectorySpec s;
  s.preset = name;
  s.duration = duration;
  if (name == "hover") {
    // all motion parameters stay zero
  } else if (name == "excited") {
    s.amplitude = Vector3d(3.0, 3.0, 1.0);
    s.frequency = Vector3d(0.10, 0.13, 0.17);
    s.phase = Vector3d(0.0, 0.5 * M_PI, 0.3);
    s.euler_amplitude = Vector3d(0.35, 0.35, 0.6);
    s.euler_frequency = Vector3d(0.15, 0.11, 0.07);
    s.euler_phase = Vector3d(0.0, 0.7, 0.0);
  } else if (name == "line") {
    s.center = Vector3d(-10.0, 0.0, 1.5);
    s.linear_velocity = Vector3d(1.0, 0.0, 0.0);
    s.amplitude = Vector3d(0.0, 0.05, 0.05);
    s.frequency = Vector3d(0.0, 0.2, 0.25);
  } else {
    throw std::invalid_argument("unknown trajectory preset '" + name + "'");
  }
  s.validate();
  return s;
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("trajectory duration must be positive");
  if (!nonnegative(frequency) || !nonnegative(euler_frequency)) {
    throw std::invalid_argument("trajectory frequencies must be non-negative");
  }
}

Trajectory::Trajectory(TrajectorySpec spec) : spec_(std::move(spec)) { spec_.validate(); }

TrajectorySample Trajectory::sample(double t) const {
  const Sinusoid pos = evaluate(spec_.amplitude, spec_.frequency, spec_.phase, t);
  const Sinusoid eul = evaluate(spec_.euler_amplitude, spec_.euler_frequency, spec_.euler_phase, t);
  const Vector3d angles = spec_.euler_offset + eul.value;

  const SO3 Rx = SO3::rot_x(angles(0));
  const SO3 Ry = SO3::rot_y(angles(1));
  const SO3 Rz = SO3::rot_z(angles(2));

  TrajectorySample s;
  s.R = Rz * Ry * Rx;
  s.p = spec_.center + pos.value + spec_.linear_velocity * t;
  s.v = pos.rate + spec_.linear_velocity;
  s.a_world = pos.accel;
  const Matrix3d RxT = Rx.matrix().transpose();
  s.omega_body = Vector3d::UnitX() * eul.rate(0) + RxT * Vector3d::UnitY() * eul.rate(1) +
                 RxT * Ry.matrix().transpose() * Vector3d::UnitZ() * eul.rate(2);
  return s;
}

void SimConfig::validate() const {
  if (!(imu_rate > 0.0) || !(radar_rate > 0.0)) throw std::invalid_argument("rates must be positive");
  if (imu_rate < radar_rate) throw std::invalid_argument("imu rate must not be below radar rate");
  if (gyro_noise < 0 || accel_noise < 0 || gyro_bias_walk < 0 || accel_bias_walk < 0 || sigma_kappa < 0 ||
      sigma_rho < 0 || sigma_vd < 0 || gyro_bias_sigma < 0 || accel_bias_sigma < 0) {
    throw std::invalid_argument("noise parameters must be non-negative");
  }
  if (landmark_count < 0) throw std::invalid_argument("landmark count must be non-negative");
  if (!(max_range > min_range) || !(min_range > kMinRange)) throw std::invalid_argument("invalid range limits");
  if (mismatch_rate < 0.0 || mismatch_rate > 1.0) throw std::invalid_argument("mismatch rate must be in [0, 1]");
}

ImuRecord synthesize_imu(const Trajectory& trajectory, double t, double dt, const Vector3d& gyro_bias,
                         const Vector3d& accel_bias, const Vector3d& gravity) {
  const TrajectorySample s = trajectory.sample(t + 0.5 * dt);
  ImuRecord rec;
  rec.t = t;
  rec.gyro = s.omega_body + gyro_bias;
  rec.acc = s.R.matrix().transpose() * (s.a_world - gravity) + accel_bias;
  return rec;
}

std::vector<RadarDetection> synthesize_radar_scan(const SystemState& xi, const Vector3d& gyro,
                                                  const std::vector<Vector3d>& landmarks, const SimConfig& config) {
  const SE3 radar_inv = xi.radar_pose().inverse();
  const double cos_fov = std::cos(config.fov_half_angle);
  std::vector<RadarDetection> detections;
  for (std::size_t id = 0; id < landmarks.size(); ++id) {
    const Vector3d p_f = radar_inv * landmarks[id];
    const double range = p_f.norm();
    if (range < config.min_range || range > config.max_range) continue;
    if (p_f.x() < cos_fov * range) continue;
    RadarDetection det;
    det.feature_id = static_cast<int>(id);
    det.p_f = p_f;
    det.doppler = doppler_model(xi, p_f, gyro);
    detections.push_back(det);
  }
  return detections;
}

SimOutput run_simulation(const TrajectorySpec& spec, const SimConfig& config) {
  config.validate();
  const Trajectory trajectory(spec);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian3 = [&](double sigma) { return Vector3d(sigma * normal(rng), sigma * normal(rng), sigma * normal(rng)); };

  const double dt = 1.0 / config.imu_rate;
  const int steps = static_cast<int>(std::llround(spec.duration * config.imu_rate));
  const int radar_count = static_cast<int>(std::floor(spec.duration * config.radar_rate + 1e-9));

  SimOutput out;
  out.extrinsic = config.extrinsic;
  out.imu_rate = config.imu_rate;
  out.radar_rate = config.radar_rate;

  // Landmarks fill the trajectory's bounding box grown by the configured margin.
  Vector3d lo = Vector3d::Constant(1e300), hi = Vector3d::Constant(-1e300);
  for (int i = 0; i <= 200; ++i) {
    const Vector3d p = trajectory.sample(spec.duration * i / 200.0).p;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo -= config.landmark_half_extent;
  hi += config.landmark_half_extent;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < config.landmark_count; ++i) {
    Vector3d l;
    for (int j = 0; j < 3; ++j) l(j) = lo(j) + (hi(j) - lo(j)) * unit(rng);
    out.landmarks.push_back(l);
  }

  // Tick index of each radar scan.
  std::vector<int> radar_ticks;
  for (int j = 1; j <= radar_count; ++j) {
    radar_ticks.push_back(static_cast<int>(std::llround(j * config.imu_rate / config.radar_rate)));
  }

  const TrajectorySample s0 = trajectory.sample(0.0);
  SystemState xi;
  xi.T = SE23(s0.R, s0.v, s0.p);
  xi.L = config.extrinsic;
  xi.b.head<3>() = gaussian3(config.gyro_bias_sigma);
  xi.b.segment<3>(3) = gaussian3(config.accel_bias_sigma);

  const double gyro_std = config.gyro_noise * std::sqrt(config.imu_rate);
  const double accel_std = config.accel_noise * std::sqrt(config.imu_rate);
  const double gyro_walk_std = config.gyro_bias_walk * std::sqrt(dt);
  const double accel_walk_std = config.accel_bias_walk * std::sqrt(dt);
  std::bernoulli_distribution mismatch(config.mismatch_rate);
  std::uniform_int_distribution<int> any_landmark(0, std::max(0, config.landmark_count - 1));

  std::size_t next_radar = 0;
  out.truth.reserve(steps + 1);
  out.imu.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;
    out.truth.push_back({t, xi.T, xi.b.head<3>(), xi.b.segment<3>(3)});

    const ImuRecord clean = synthesize_imu(trajectory, t, dt, xi.b.head<3>(), xi.b.segment<3>(3), config.gravity);
    ImuRecord measured = clean;
    measured.gyro += gaussian3(gyro_std);
    measured.acc += gaussian3(accel_std);
    out.imu.push_back(measured);

    if (next_radar < radar_ticks.size() && radar_ticks[next_radar] == i) {
      RadarScan scan;
      scan.t = t;
      scan.scan_id = static_cast<int>(next_radar);
      scan.detections = synthesize_radar_scan(xi, clean.gyro, out.landmarks, config);
      for (RadarDetection& det : scan.detections) {
        const Vector3d eta(config.sigma_kappa * normal(rng), config.sigma_rho * normal(rng),
                           config.sigma_rho * normal(rng));
        det.p_f = apply_spherical_noise(det.p_f, eta);
        det.doppler += config.sigma_vd * normal(rng);
        if (config.mismatch_rate > 0.0 && mismatch(rng)) det.feature_id = any_landmark(rng);
      }
      out.radar.push_back(std::move(scan));
      ++next_radar;
    }

    if (i == steps) break;
    SystemInput u = SystemInput::from_imu(clean.gyro, clean.acc);
    Vector9d tau = Vector9d::Zero();
    tau.head<3>() = gaussian3(gyro_walk_std) / dt;
    tau.segment<3>(3) = gaussian3(accel_walk_std) / dt;
    u.tau = tau;
    xi = discrete_dynamics(xi, u, dt, config.gravity);
  }
  return out;
}

}  // namespace eqf_rio
