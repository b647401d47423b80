#include "eqf_rio/app/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "eqf_rio/app/config.hpp"

namespace eqf_rio {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

template <class Vec>
void put(std::ostream& out, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) out << ',' << v(i);
}

/// Reads a CSV with a header line; calls row(values, line_number).
template <class Fn>
void read_csv(const fs::path& path, std::size_t columns, Fn row) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  ++number;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    values.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        values.push_back(std::stod(cell, &pos));
      } catch (const std::logic_error&) {
        throw DataError(path.string() + ":" + std::to_string(number) + ": bad number '" + cell + "'");
      }
    }
    if (values.size() != columns) {
      throw DataError(path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) +
                      " columns, got " + std::to_string(values.size()));
    }
    row(values, number);
  }
}

void check_monotone(double& last, double t, const fs::path& path, int line) {
  if (t < last) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": non-monotone timestamp " + std::to_string(t));
  }
  last = t;
}

}  // namespace

Eigen::Vector4d rotation_to_quaternion(const SO3& R) {
  Eigen::Quaterniond q(R.matrix());
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return {q.w(), q.x(), q.y(), q.z()};
}

SO3 quaternion_to_rotation(const Eigen::Vector4d& v) {
  Eigen::Quaterniond q(v(0), v(1), v(2), v(3));
  if (!(q.norm() > 0.5)) throw DataError("invalid quaternion");
  q.normalize();
  return SO3::from_matrix_normalized(q.toRotationMatrix());
}

void write_dataset(const SimOutput& data, const std::string& dir) {
  const fs::path base(dir);
  fs::create_directories(base);

  std::ofstream imu = open_out(base / "imu.csv");
  imu << "t,wx,wy,wz,ax,ay,az\n";
  for (const ImuRecord& r : data.imu) {
    imu << r.t;
    put(imu, r.gyro);
    put(imu, r.acc);
    imu << '\n';
  }

  std::ofstream radar = open_out(base / "radar.csv");
  radar << "t,scan_id,feature_id,px,py,pz,doppler\n";
  for (const RadarScan& scan : data.radar) {
    for (const RadarDetection& d : scan.detections) {
      radar << scan.t << ',' << scan.scan_id << ',' << d.feature_id;
      put(radar, d.p_f);
      radar << ',' << d.doppler << '\n';
    }
  }

  if (!data.truth.empty()) {
    std::ofstream gt = open_out(base / "groundtruth.csv");
    gt << "t,qw,qx,qy,qz,px,py,pz,vx,vy,vz\n";
    std::ofstream bias = open_out(base / "groundtruth_bias.csv");
    bias << "t,bwx,bwy,bwz,bax,bay,baz\n";
    for (const GroundTruthRecord& r : data.truth) {
      gt << r.t;
      put(gt, rotation_to_quaternion(r.T.rotation()));
      put(gt, r.T.position());
      put(gt, r.T.velocity());
      gt << '\n';
      bias << r.t;
      put(bias, r.gyro_bias);
      put(bias, r.accel_bias);
      bias << '\n';
    }
  }

  std::ofstream lm = open_out(base / "landmarks.csv");
  lm << "id,x,y,z\n";
  for (std::size_t i = 0; i < data.landmarks.size(); ++i) {
    lm << i;
    put(lm, data.landmarks[i]);
    lm << '\n';
  }

  std::ofstream meta = open_out(base / "meta.txt");
  const Eigen::Vector4d q = rotation_to_quaternion(data.extrinsic.rotation());
  const Vector3d& t = data.extrinsic.translation();
  meta << "imu_rate = " << data.imu_rate << '\n'
       << "radar_rate = " << data.radar_rate << '\n'
       << "extrinsic.quaternion = " << q(0) << ", " << q(1) << ", " << q(2) << ", " << q(3) << '\n'
       << "extrinsic.translation = " << t.x() << ", " << t.y() << ", " << t.z() << '\n';
}

std::vector<GroundTruthRecord> read_groundtruth(const std::string& path) {
  std::vector<GroundTruthRecord> truth;
  double last = -1e300;
  read_csv(path, 11, [&](const std::vector<double>& v, int line) {
    check_monotone(last, v[0], path, line);
    GroundTruthRecord r;
    r.t = v[0];
    r.T = SE23(quaternion_to_rotation({v[1], v[2], v[3], v[4]}), Vector3d(v[8], v[9], v[10]),
               Vector3d(v[5], v[6], v[7]));
    truth.push_back(r);
  });
  return truth;
}

SimOutput read_dataset(const std::string& dir) {
  const fs::path base(dir);
  SimOutput data;

  const fs::path meta_path = base / "meta.txt";
  if (fs::exists(meta_path)) {
    const KeyValueFile meta = KeyValueFile::load(meta_path.string());
    data.imu_rate = meta.get_double("imu_rate", 0.0);
    data.radar_rate = meta.get_double("radar_rate", 0.0);
    const std::string qtext = meta.get_string("extrinsic.quaternion", "1, 0, 0, 0");
    std::stringstream ss(qtext);
    Eigen::Vector4d q;
    char comma;
    ss >> q(0) >> comma >> q(1) >> comma >> q(2) >> comma >> q(3);
    data.extrinsic = SE3(quaternion_to_rotation(q), meta.get_vec3("extrinsic.translation", Vector3d::Zero()));
  }

  double last = -1e300;
  const fs::path imu_path = base / "imu.csv";
  read_csv(imu_path, 7, [&](const std::vector<double>& v, int line) {
    check_monotone(last, v[0], imu_path, line);
    data.imu.push_back({v[0], Vector3d(v[1], v[2], v[3]), Vector3d(v[4], v[5], v[6])});
  });
  if (data.imu.empty()) throw DataError(imu_path.string() + ": no IMU records");
  if (data.imu_rate <= 0.0 && data.imu.size() > 1) {
    data.imu_rate = (data.imu.size() - 1) / (data.imu.back().t - data.imu.front().t);
  }

  last = -1e300;
  const fs::path radar_path = base / "radar.csv";
  if (fs::exists(radar_path)) {
    read_csv(radar_path, 7, [&](const std::vector<double>& v, int line) {
      check_monotone(last, v[0], radar_path, line);
      const int scan_id = static_cast<int>(v[1]);
      if (data.radar.empty() || data.radar.back().scan_id != scan_id || data.radar.back().t != v[0]) {
        data.radar.push_back({v[0], scan_id, {}});
      }
      RadarDetection d;
      d.feature_id = static_cast<int>(v[2]);
      d.p_f = Vector3d(v[3], v[4], v[5]);
      d.doppler = v[6];
      data.radar.back().detections.push_back(d);
    });
  }

  const fs::path gt_path = base / "groundtruth.csv";
  if (fs::exists(gt_path)) {
    data.truth = read_groundtruth(gt_path.string());
    const fs::path bias_path = base / "groundtruth_bias.csv";
    if (fs::exists(bias_path)) {
      std::size_t i = 0;
      read_csv(bias_path, 7, [&](const std::vector<double>& v, int line) {
        if (i >= data.truth.size() || data.truth[i].t != v[0]) {
          throw DataError(bias_path.string() + ":" + std::to_string(line) + ": does not match groundtruth.csv");
        }
        data.truth[i].gyro_bias = Vector3d(v[1], v[2], v[3]);
        data.truth[i].accel_bias = Vector3d(v[4], v[5], v[6]);
        ++i;
      });
    }
  }

  const fs::path lm_path = base / "landmarks.csv";
  if (fs::exists(lm_path)) {
    read_csv(lm_path, 4, [&](const std::vector<double>& v, int) { data.landmarks.emplace_back(v[1], v[2], v[3]); });
  }
  return data;
}

void write_estimates(const std::vector<EstimateRecord>& records, const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out = open_out(p);
  out << "t,qw,qx,qy,qz,px,py,pz,vx,vy,vz,bwx,bwy,bwz,bax,bay,baz,bvx,bvy,bvz,sqw,sqx,sqy,sqz,tx,ty,tz";
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) out << ",c" << i << j;
  }
  out << '\n';
  for (const EstimateRecord& r : records) {
    out << r.t;
    put(out, rotation_to_quaternion(r.T.rotation()));
    put(out, r.T.position());
    put(out, r.T.velocity());
    put(out, r.b);
    put(out, rotation_to_quaternion(r.L.rotation()));
    put(out, r.L.translation());
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) out << ',' << r.pose_covariance(i, j);
    }
    out << '\n';
  }
}

std::vector<EstimateRecord> read_estimates(const std::string& path) {
  std::vector<EstimateRecord> records;
  double last = -1e300;
  read_csv(path, 27 + 21, [&](const std::vector<double>& v, int line) {
    check_monotone(last, v[0], path, line);
    EstimateRecord r;
    r.t = v[0];
    r.T = SE23(quaternion_to_rotation({v[1], v[2], v[3], v[4]}), Vector3d(v[8], v[9], v[10]),
               Vector3d(v[5], v[6], v[7]));
    for (int i = 0; i < 9; ++i) r.b(i) = v[11 + i];
    r.L = SE3(quaternion_to_rotation({v[20], v[21], v[22], v[23]}), Vector3d(v[24], v[25], v[26]));
    int k = 27;
    for (int i = 0; i < 6; ++i) {
      for (int j = i; j < 6; ++j) {
        r.pose_covariance(i, j) = v[k];
        r.pose_covariance(j, i) = v[k];
        ++k;
      }
    }
    records.push_back(r);
  });
  return records;
}

}  // namespace eqf_rio
