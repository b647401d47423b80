#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eqf_rio/app/config.hpp"
#include "eqf_rio/app/io.hpp"
#include "eqf_rio/app/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace eqf_rio;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

KeyValueFile load_config_file(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("file not found: " + path);
  return KeyValueFile::load(path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text << '\n';
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<SO3> load_meta_extrinsic(const std::string& path) {
  if (path.empty()) return std::nullopt;
  const KeyValueFile meta = load_config_file(path);
  const std::string text = meta.get_string("extrinsic.quaternion", "");
  if (text.empty()) return std::nullopt;
  Eigen::Vector4d q;
  std::stringstream ss(text);
  std::string tok;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(ss, tok, ',')) throw ConfigError(path + ": extrinsic.quaternion needs 4 values");
    q(i) = std::stod(tok);
  }
  return quaternion_to_rotation(q);
}

int cmd_simulate(const std::string& spec_path, const std::string& out) {
  const SimSpec spec = load_sim_spec(load_config_file(spec_path));
  const SimOutput data = run_simulation(spec.trajectory, spec.sim);
  write_dataset(data, out);
  std::cout << "wrote " << data.imu.size() << " IMU rows and " << data.radar.size() << " radar scans to " << out
            << '\n';
  return 0;
}

int cmd_run(const std::string& data_dir, const std::string& config_path, const std::string& out) {
  const RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(load_config_file(config_path));
  if (!fs::is_directory(data_dir)) throw UsageError("dataset directory not found: " + data_dir);
  const SimOutput data = read_dataset(data_dir);
  const RunResult result = run_filter(data, config);
  fs::create_directories(out);
  write_estimates(result.estimates, (fs::path(out) / "estimates.csv").string());

  std::ofstream calib(fs::path(out) / "calibration.csv");
  calib << "t,qw,qx,qy,qz,tx,ty,tz,e_angle_rad\n";
  calib.precision(17);
  for (const EstimateRecord& r : result.estimates) {
    const Eigen::Vector4d q = rotation_to_quaternion(r.L.rotation());
    const Vector3d& t = r.L.translation();
    calib << r.t << ',' << q(0) << ',' << q(1) << ',' << q(2) << ',' << q(3) << ',' << t.x() << ',' << t.y() << ','
          << t.z() << ',';
    if (data.imu_rate > 0.0) calib << calibration_error(data.extrinsic.rotation(), r.L.rotation());
    calib << '\n';
  }

  const FilterBelief& b = result.final_belief;
  std::ofstream belief(fs::path(out) / "final_belief.txt");
  belief.precision(17);
  belief << "t = " << b.last_time << "\nclones = " << b.clone_count() << "\nsigma_dim = " << b.Sigma.rows()
         << "\nsigma =\n" << b.Sigma << '\n';

  nlohmann::ordered_json stats;
  stats["estimates"] = result.estimates.size();
  stats["propagations"] = result.stats.propagations;
  stats["doppler_updates"] = result.stats.doppler_updates;
  stats["msc_updates"] = result.stats.msc_updates;
  stats["msc_rows"] = result.stats.msc_rows;
  stats["gated_rows"] = result.stats.gated_rows;
  stats["singular_updates"] = result.stats.singular_updates;
  stats["clones_created"] = result.stats.clones_created;
  write_text(fs::path(out) / "run_stats.json", stats.dump(2));
  std::cout << "wrote " << result.estimates.size() << " estimates to " << out << '\n';
  return 0;
}

int cmd_evaluate(const std::string& est_path, const std::string& gt_path, const std::string& meta_path,
                 const std::string& out) {
  if (!fs::exists(est_path)) throw UsageError("file not found: " + est_path);
  if (!fs::exists(gt_path)) throw UsageError("file not found: " + gt_path);
  const std::vector<EstimateRecord> est = read_estimates(est_path);
  const std::vector<GroundTruthRecord> gt = read_groundtruth(gt_path);
  AlignedPair pair;
  const MetricsReport report = evaluate_run(est, gt, load_meta_extrinsic(meta_path), &pair);
  fs::create_directories(out);
  emit_plot_data(pair, report, out);
  const std::string json = report_to_json(report);
  write_text(fs::path(out) / "metrics.json", json);
  std::cout << json << '\n';
  return 0;
}

int cmd_montecarlo(const std::string& spec_path, const std::string& config_path, int seeds,
                   const std::string& perturb, const std::string& out) {
  if (seeds < 1) throw UsageError("--seeds must be at least 1");
  const SimSpec spec = load_sim_spec(load_config_file(spec_path));
  const RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(load_config_file(config_path));
  std::vector<CalibPerturbation> perturbations;
  for (const std::string& p : split_list(perturb)) perturbations.push_back(parse_perturbation(p));
  if (perturbations.empty()) perturbations.push_back(parse_perturbation("none"));

  std::vector<MonteCarloJob> jobs;
  for (const CalibPerturbation& p : perturbations) {
    for (int s = 0; s < seeds; ++s) jobs.push_back({spec.sim.seed + static_cast<std::uint64_t>(s), p});
  }
  const std::vector<MonteCarloOutcome> outcomes = run_montecarlo(spec, config, jobs, thread_budget());

  fs::create_directories(out);
  std::ofstream job_csv(fs::path(out) / "jobs.csv");
  job_csv << "perturbation,seed,ok,translation_rmse_m,rotation_rmse_deg,drift_cm_per_m,anees,final_e_angle_deg,"
             "convergence,error\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const CalibPerturbation& p : perturbations) {
    std::vector<double> trans, rot, drift, anees_values;
    int ok = 0, converged = 0, partial = 0, failed = 0;
    for (const MonteCarloOutcome& o : outcomes) {
      if (o.job.perturbation.label != p.label) continue;
      const MetricsReport& r = o.report;
      const fs::path job_dir = fs::path(out) / p.label / ("seed_" + std::to_string(o.job.seed));
      fs::create_directories(job_dir);
      job_csv << p.label << ',' << o.job.seed << ',' << (o.ok ? 1 : 0) << ',';
      if (!o.ok) {
        job_csv << ",,,,,," << '"' << o.error << '"' << '\n';
        write_text(job_dir / "error.txt", o.error);
        ++failed;
        continue;
      }
      ++ok;
      write_text(job_dir / "metrics.json", report_to_json(r, &o.stats));
      trans.push_back(r.translation_rmse);
      rot.push_back(r.rotation_rmse_deg);
      drift.push_back(r.position_drift_cm_per_m);
      if (r.anees) anees_values.push_back(*r.anees);
      const Convergence c = r.convergence.value_or(Convergence::Fail);
      converged += c == Convergence::Converged;
      partial += c == Convergence::Partial;
      failed += c == Convergence::Fail;
      job_csv << r.translation_rmse << ',' << r.rotation_rmse_deg << ',' << r.position_drift_cm_per_m << ','
              << (r.anees ? std::to_string(*r.anees) : "") << ',' << o.final_calib_error * 180.0 / M_PI << ','
              << to_string(c) << ",\n";
    }
    nlohmann::ordered_json row;
    row["perturbation"] = p.label;
    row["jobs"] = seeds;
    row["ok"] = ok;
    row["median_translation_rmse_m"] = median(trans);
    row["median_rotation_rmse_deg"] = median(rot);
    row["median_drift_cm_per_m"] = median(drift);
    row["median_anees"] = anees_values.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(median(anees_values));
    row["converged"] = converged;
    row["partial"] = partial;
    row["failed"] = failed;
    rows.push_back(row);
  }
  const std::string json = rows.dump(2);
  write_text(fs::path(out) / "aggregate.json", json);
  std::cout << json << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant filter for radar-inertial odometry"};
  app.require_subcommand(1);

  std::string spec, out, data, config, est, gt, meta, perturb = "none";
  int seeds = 1;

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--spec", spec, "Simulation spec file")->required();
  sim->add_option("--out", out, "Output dataset directory")->required();

  CLI::App* run = app.add_subcommand("run", "Run the filter on a dataset");
  run->add_option("--data", data, "Dataset directory")->required();
  run->add_option("--config", config, "Run configuration file");
  run->add_option("--out", out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("evaluate", "Compute metrics for an estimate file");
  eval->add_option("--est", est, "estimates.csv")->required();
  eval->add_option("--gt", gt, "groundtruth.csv")->required();
  eval->add_option("--meta", meta, "meta.txt holding the true extrinsic");
  eval->add_option("--out", out, "Output directory")->required();

  CLI::App* mc = app.add_subcommand("montecarlo", "Monte-Carlo sweep over seeds and perturbations");
  mc->add_option("--spec", spec, "Simulation spec file")->required();
  mc->add_option("--config", config, "Run configuration file");
  mc->add_option("--seeds", seeds, "Number of seeds")->required();
  mc->add_option("--perturb", perturb, "Comma-separated perturbations, e.g. none,y:40deg,y:80deg");
  mc->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(spec, out);
    if (*run) return cmd_run(data, config, out);
    if (*eval) return cmd_evaluate(est, gt, meta, out);
    if (*mc) return cmd_montecarlo(spec, config, seeds, perturb, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
