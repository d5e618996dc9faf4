#include "dropletlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dropletlab/ball_spectrum.hpp"
#include "dropletlab/cgo.hpp"
#include "dropletlab/foldy_lax.hpp"
#include "dropletlab/forward.hpp"
#include "dropletlab/geometry.hpp"
#include "dropletlab/kernels.hpp"
#include "dropletlab/linearize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dlab {

namespace {

const std::vector<std::string> known_experiments = {"spectra",   "forward",     "converge",
                                                    "linearize", "reconstruct", "selftest"};

json medium_to_json(const MediumSpec& m) {
  json jm;
  jm["offset"] = m.offset;
  jm["terms"] = json::array();
  for (const auto& t : m.terms) jm["terms"].push_back({{"amp", t.amp}, {"m", t.m}});
  return jm;
}

MediumSpec medium_from_json(const json& jm) {
  double offset = jm.value("offset", 1.0);
  std::vector<CosTerm> terms;
  if (jm.contains("terms"))
    for (const auto& jt : jm.at("terms")) {
      CosTerm t;
      t.amp = jt.at("amp").get<double>();
      const auto mv = jt.at("m").get<std::vector<int>>();
      if (mv.size() != 3) throw invalid_config("medium term: 'm' must have three entries");
      t.m = {mv[0], mv[1], mv[2]};
      terms.push_back(t);
    }
  return MediumSpec(offset, std::move(terms));
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

// --- ball spectrum cache ------------------------------------------------

std::string spectrum_cache_key(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "spectrum-r" << cfg.spectra_resolution << "-l" << cfg.spectra_lmax << "-n"
     << cfg.spectra_nradial;
  return os.str();
}

json spectrum_to_json(const NewtonianSpectrum& s) {
  json j;
  j["radius"] = s.radius;
  j["resolution"] = s.resolution;
  j["lmax"] = s.lmax;
  j["nradial"] = s.nradial;
  j["nodes"] = s.nodes;
  j["weights"] = s.weights;
  j["modes"] = json::array();
  for (const auto& m : s.modes)
    j["modes"].push_back(
        {{"l", m.l}, {"radial", m.radial}, {"lambda", m.lambda}, {"overlap", m.overlap},
         {"phi", m.phi}});
  return j;
}

NewtonianSpectrum spectrum_from_json(const json& j) {
  NewtonianSpectrum s;
  s.radius = j.at("radius").get<double>();
  s.resolution = j.at("resolution").get<int>();
  s.lmax = j.at("lmax").get<int>();
  s.nradial = j.at("nradial").get<int>();
  s.nodes = j.at("nodes").get<std::vector<double>>();
  s.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& jm : j.at("modes")) {
    BallMode m;
    m.l = jm.at("l").get<int>();
    m.radial = jm.at("radial").get<int>();
    m.lambda = jm.at("lambda").get<double>();
    m.overlap = jm.at("overlap").get<double>();
    m.phi = jm.at("phi").get<std::vector<double>>();
    s.modes.push_back(std::move(m));
  }
  return s;
}

NewtonianSpectrum cached_spectrum(const ExperimentConfig& cfg) {
  const std::string dir = join_path(cfg.out_dir, "cache");
  const std::string path = join_path(dir, spectrum_cache_key(cfg) + ".json");
  if (!cfg.no_cache && fs::exists(path)) {
    std::ifstream in(path);
    json j;
    in >> j;
    return spectrum_from_json(j);
  }
  NewtonianSpectrum s =
      solve_ball_spectrum(cfg.spectra_resolution, cfg.spectra_lmax, cfg.spectra_nradial);
  if (!cfg.no_cache) {
    ensure_dir(dir);
    std::ofstream out(path);
    out << spectrum_to_json(s).dump();
  }
  return s;
}

// --- helmholtz kernel matrix cache ---------------------------------------

Kernel cached_helmholtz(const ExperimentConfig& cfg, double omega) {
  const ModeGrid g{cfg.grid_n};
  if (cfg.no_cache) return Kernel::make_helmholtz(g, omega, cfg.medium);
  std::uint64_t key = fnv1a64(&omega, sizeof omega, cfg.medium.hash());
  key = fnv1a64(&cfg.grid_n, sizeof cfg.grid_n, key);
  const std::string dir = join_path(cfg.out_dir, "cache");
  const std::string path = join_path(dir, "kernel-helmholtz-" + hash_hex(key) + ".bin");
  const std::size_t sz = g.size();
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    Eigen::MatrixXd A(sz, sz);
    in.read(reinterpret_cast<char*>(A.data()), static_cast<std::streamsize>(sizeof(double) * sz * sz));
    if (in.gcount() == static_cast<std::streamsize>(sizeof(double) * sz * sz))
      return Kernel::make_helmholtz_precomputed(g, omega, cfg.medium, std::move(A));
  }
  Kernel k = Kernel::make_helmholtz(g, omega, cfg.medium);
  ensure_dir(dir);
  std::ofstream out(path, std::ios::binary);
  const Eigen::MatrixXd& A = k.galerkin_matrix();
  out.write(reinterpret_cast<const char*>(A.data()),
            static_cast<std::streamsize>(sizeof(double) * sz * sz));
  return k;
}

void write_manifest(const ExperimentConfig& cfg, const RunResult& res) {
  json j;
  j["version"] = version_string;
  j["experiment"] = cfg.experiment;
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["config"] = json::parse(cfg.canonical_json());
  j["artifacts"] = res.artifacts;
  j["residuals"] = json::object();
  for (const auto& [k, v] : res.residuals) j["residuals"][k] = v;
  j["status"] = res.status;
  std::ofstream out(join_path(cfg.out_dir, cfg.experiment + "_manifest.json"));
  out << j.dump(2) << "\n";
}

std::string pair_name(int i) { return "pair" + std::to_string(i); }

// 6 fixed (f, g) combinations from the default source family.
void make_pairs(int grid_n, int count, std::vector<BoundaryField>& fs,
                std::vector<BoundaryField>& gs, std::vector<std::string>& ids) {
  const auto sources = default_test_sources(grid_n, std::max(count, 2));
  for (int i = 0; i < count; ++i) {
    fs.push_back(sources[i]);
    gs.push_back(sources[(i + 1) % sources.size()]);
    ids.push_back(pair_name(i));
  }
}

// --- experiments ----------------------------------------------------------

RunResult run_spectra(const ExperimentConfig& cfg) {
  RunResult res;
  const NewtonianSpectrum spec = cached_spectrum(cfg);

  CsvWriter eig(join_path(cfg.out_dir, "spectra_eigenvalues.csv"),
                {"l", "radial", "lambda", "overlap"});
  for (const auto& m : spec.modes)
    eig.row({std::to_string(m.l), std::to_string(m.radial), CsvWriter::cell(m.lambda),
             CsvWriter::cell(m.overlap)});
  res.artifacts.push_back(eig.path());

  CsvWriter alpha(join_path(cfg.out_dir, "spectra_alpha.csv"),
                  {"a", "h", "omega_sq", "p_sq", "alpha", "dominant", "tail", "scaled_ratio"});
  double max_disp = 0.0;
  for (double a : cfg.a_list) {
    const ResonanceParams rp = make_resonance(spec, cfg.n0, cfg.c_n0, cfg.k0, cfg.rho0, a, cfg.h,
                                              cfg.medium.max_norm());
    const AlphaSplit sp = scattering_alpha(rp, spec);
    max_disp = std::max(max_disp, std::abs(rp.dispersion_residual()));
    alpha.row({CsvWriter::cell(a), CsvWriter::cell(cfg.h), CsvWriter::cell(rp.omega_sq),
               CsvWriter::cell(rp.p_sq), CsvWriter::cell(sp.total), CsvWriter::cell(sp.dominant),
               CsvWriter::cell(sp.tail),
               CsvWriter::cell(sp.total / (std::pow(a, 1.0 - cfg.h) * -rp.p_sq))});
  }
  res.artifacts.push_back(alpha.path());
  res.residuals["max_dispersion_residual"] = max_disp;
  return res;
}

RunResult run_forward(const ExperimentConfig& cfg) {
  RunResult res;
  const ModeGrid g{cfg.grid_n};
  const auto sources = default_test_sources(cfg.grid_n, std::max(cfg.pairs, 2));

  CsvWriter sweep(join_path(cfg.out_dir, "forward_sweep.csv"),
                  {"P", "f_id", "qf_l2", "ug_l2", "born_remainder_l2"});
  for (double P : cfg.p_list) {
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const SpectralField qf = solve_qf(g, P, sources[i]);
      const SpectralField ug = solve_ug(g, cfg.medium, cfg.omega, P, sources[i]);
      // Born remainder u - q - omega^2 N^p(n^2 q)
      Eigen::VectorXcd born = cfg.omega * cfg.omega * cfg.medium.apply_n2(g, qf.c);
      for (std::size_t t = 0; t < g.size(); ++t) born[t] /= (g.ksq(t) + P * P);
      const double rem = (ug.c - qf.c - born).norm();
      sweep.row({CsvWriter::cell(P), std::to_string(i), CsvWriter::cell(qf.l2_norm()),
                 CsvWriter::cell(ug.l2_norm()), CsvWriter::cell(rem)});
    }
  }
  res.artifacts.push_back(sweep.path());

  // reciprocity check at an arbitrary frequency away from eigenvalues
  const Kernel helm = cached_helmholtz(cfg, cfg.omega);
  const SpectralField p0 = solve_pf(helm, sources[0]);
  const SpectralField p1 = solve_pf(helm, sources[1]);
  const cplx l01 = boundary_pairing(trace(p0), sources[1]);
  const cplx l10 = boundary_pairing(trace(p1), sources[0]);
  res.residuals["reciprocity_residual"] = std::abs(l01 - l10);
  res.residuals["kernel_condition_estimate"] = helm.condition_estimate();
  return res;
}

RunResult run_converge(const ExperimentConfig& cfg) {
  RunResult res;
  const NewtonianSpectrum spec = cached_spectrum(cfg);
  const DomainSpec dom;

  std::vector<BoundaryField> fs, gs;
  std::vector<std::string> ids;
  make_pairs(cfg.grid_n, cfg.pairs, fs, gs, ids);

  CsvWriter table(join_path(cfg.out_dir, "converge.csv"),
                  {"a", "h", "M", "P", "pair_id", "lambda0", "lambdaP", "lambdaD", "J",
                   "J_surrogate"});
  CsvWriter dev(join_path(cfg.out_dir, "converge_deviation.csv"),
                {"a", "h", "M", "max_dev", "slope_so_far"});

  std::vector<double> devs, as_done;
  double max_identity = 0.0;
  for (double a : cfg.a_list) {
    const ResonanceParams rp = make_resonance(spec, cfg.n0, cfg.c_n0, cfg.k0, cfg.rho0, a, cfg.h,
                                              cfg.medium.max_norm());
    const Kernel helm = cached_helmholtz(cfg, rp.omega());
    const DropletCluster cl = build_lattice(dom, a, cfg.h, cfg.kappa, cfg.lattice_margin);

    PairingConfig pc;
    pc.nvox = cfg.nvox;
    pc.threads = cfg.threads;
    const auto report = pairing_report(fs, gs, ids, cl, helm, rp, spec, cfg.medium, pc);
    for (const auto& e : report) {
      table.row({CsvWriter::cell(a), CsvWriter::cell(cfg.h), std::to_string(cl.count()),
                 CsvWriter::cell(rp.p()), e.pair_id, CsvWriter::cell(e.lambda0.real()),
                 CsvWriter::cell(e.lambdaP.real()), CsvWriter::cell(e.lambdaD.real()),
                 CsvWriter::cell(std::abs(e.j_value)), CsvWriter::cell(std::abs(e.j_surrogate))});
      if (e.identity_residual >= 0.0) max_identity = std::max(max_identity, e.identity_residual);
    }

    // discrete-to-continuum deviation for the first datum
    const SpectralField sg = solve_pf(helm, gs[0]);
    FoldyLaxSystem sys = assemble_foldy_lax(cl, helm, rp, spec, sg, cfg.threads);
    const FoldyLaxSolution sol = solve_foldy_lax(sys);
    const SpectralField Y = continuous_lse(helm, sys.alpha_bar, sg);
    const double d = discrete_continuum_deviation(sys, sol, Y);
    devs.push_back(d);
    as_done.push_back(a);
    const double slope =
        (devs.size() >= 2) ? fit_loglog_slope(as_done, devs) : 0.0;
    dev.row({CsvWriter::cell(a), CsvWriter::cell(cfg.h), std::to_string(cl.count()),
             CsvWriter::cell(d), CsvWriter::cell(slope)});
    res.residuals["fl_residual_a=" + format_double(a)] = sol.residual;
  }
  res.artifacts.push_back(table.path());
  res.artifacts.push_back(dev.path());
  if (devs.size() >= 2) res.residuals["deviation_slope"] = fit_loglog_slope(as_done, devs);
  if (max_identity > 0.0) res.residuals["max_identity_residual"] = max_identity;

  // long-format plot data
  std::vector<std::string> px, pq;
  std::vector<double> pv;
  for (std::size_t i = 0; i < devs.size(); ++i) {
    px.push_back(format_double(as_done[i]));
    pq.push_back("max_dev");
    pv.push_back(devs[i]);
  }
  const std::string plot = join_path(cfg.out_dir, "converge_plot.csv");
  emit_plotdata(plot, px, pq, pv);
  res.artifacts.push_back(plot);
  return res;
}

RunResult run_linearize(const ExperimentConfig& cfg) {
  RunResult res;
  const ModeGrid g{cfg.grid_n};
  const auto sources = default_test_sources(cfg.grid_n, 3);
  const auto samples = linearization_residual(g, cfg.medium, cfg.omega, cfg.p_list, sources);

  CsvWriter table(join_path(cfg.out_dir, "linearize.csv"),
                  {"P", "f_id", "lead_norm", "residual_norm"});
  for (const auto& s : samples)
    table.row({CsvWriter::cell(s.P), std::to_string(s.f_index), CsvWriter::cell(s.lead_norm),
               CsvWriter::cell(s.residual_norm)});
  res.artifacts.push_back(table.path());

  // per-source slope
  for (int fi = 0; fi < 3; ++fi) {
    std::vector<double> ps, rs;
    for (const auto& s : samples)
      if (s.f_index == fi && s.residual_norm > 0) {
        ps.push_back(s.P);
        rs.push_back(s.residual_norm);
      }
    if (ps.size() >= 2)
      res.residuals["residual_slope_f" + std::to_string(fi)] = fit_loglog_slope(ps, rs);
  }

  const BornReport born =
      born_tail(g, cfg.medium, cfg.omega, cfg.p_list.front(), sources[0], 6);
  res.residuals["born_ratio"] = born.ratio;
  res.residuals["born_tail_vs_reference"] = born.tail_vs_reference;
  return res;
}

RunResult run_reconstruct(const ExperimentConfig& cfg) {
  RunResult res;
  const bool meas = (cfg.mode == "measurement");

  CsvWriter summary(join_path(cfg.out_dir, "reconstruct_summary.csv"),
                    {"P", "sigma", "L", "err_vs_truth", "err_vs_band", "floor", "max_c0_r1",
                     "max_c0_r2"});
  std::vector<double> ps, errs;
  json coeff_tables = json::array();
  ReconstructionResult last;
  for (double P : cfg.p_list) {
    CgoConfig cc;
    cc.P = P;
    cc.sigma = cfg.sigma;
    const ReconstructionResult r =
        reconstruct(cfg.L, cc, cfg.medium, meas, cfg.omega, cfg.n_meas, cfg.threads);
    double c1 = 0.0, c2 = 0.0;
    for (const auto& e : r.entries) {
      c1 = std::max(c1, e.c0_r1);
      c2 = std::max(c2, e.c0_r2);
    }
    summary.row({CsvWriter::cell(P), CsvWriter::cell(cfg.sigma), std::to_string(cfg.L),
                 CsvWriter::cell(r.err_vs_truth), CsvWriter::cell(r.err_vs_band),
                 CsvWriter::cell(r.floor_norm), CsvWriter::cell(c1), CsvWriter::cell(c2)});
    ps.push_back(P);
    errs.push_back(r.err_vs_band);

    json tab;
    tab["P"] = P;
    tab["coefficients"] = json::array();
    for (const auto& e : r.entries)
      tab["coefficients"].push_back({{"l", e.l},
                                     {"value_re", e.value.real()},
                                     {"value_im", e.value.imag()},
                                     {"exact_re", e.exact.real()},
                                     {"exact_im", e.exact.imag()},
                                     {"budget", e.budget}});
    coeff_tables.push_back(tab);
    last = r;
  }
  res.artifacts.push_back(summary.path());
  if (ps.size() >= 2) res.residuals["err_vs_band_slope"] = fit_loglog_slope(ps, errs);

  const std::string ctab_path = join_path(cfg.out_dir, "reconstruct_coefficients.json");
  {
    std::ofstream out(ctab_path);
    out << coeff_tables.dump(2) << "\n";
  }
  res.artifacts.push_back(ctab_path);

  // reconstruction slice at x3 = pi with the ground-truth column
  CsvWriter slice(join_path(cfg.out_dir, "reconstruct_slice.csv"),
                  {"x1", "x2", "recon_re", "recon_im", "truth"});
  const int ng = 41;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      const Vector3d x(omega_lo + i * pi / (ng - 1), omega_lo + j * pi / (ng - 1), pi);
      const cplx v = synthesize_coeffs(last.entries, x);
      slice.row({CsvWriter::cell(x[0]), CsvWriter::cell(x[1]), CsvWriter::cell(v.real()),
                 CsvWriter::cell(v.imag()), CsvWriter::cell(cfg.medium.eval(x))});
    }
  res.artifacts.push_back(slice.path());
  return res;
}

RunResult run_selftest(const ExperimentConfig& cfg) {
  RunResult res;
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, double value) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << format_double(value) << ")\n";
    res.residuals[name] = value;
    if (!ok) ++failures;
  };

  const ModeGrid g{8};
  // Parseval
  {
    SpectralField f(g);
    for (std::size_t t = 0; t < g.size(); ++t)
      f.c[t] = cplx(std::sin(0.1 * double(t + 1)), std::cos(0.2 * double(t + 1)));
    const int nq = 2 * g.n + 12;  // |f|^2 carries frequencies up to 2(n-1)
    const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
    double s = 0.0;
    for (int i1 = 0; i1 < nq; ++i1)
      for (int i2 = 0; i2 < nq; ++i2)
        for (int i3 = 0; i3 < nq; ++i3) {
          const cplx v = evaluate(f, Vector3d(q.nodes[i1], q.nodes[i2], q.nodes[i3]));
          s += q.weights[i1] * q.weights[i2] * q.weights[i3] * std::norm(v);
        }
    const double err = std::abs(std::sqrt(s) - f.l2_norm()) / f.l2_norm();
    check("parseval", err < 1e-10, err);
  }
  // kernel symmetry through the stable evaluator (images + modes + band)
  {
    const Kernel gp = Kernel::make_gp(ModeGrid{12}, 6.0);
    const Vector3d x(2.0, 2.2, 2.4), y(3.9, 3.7, 3.5);
    const double es =
        std::abs(gp.stable_eval(x, y) - gp.stable_eval(y, x)) / std::abs(gp.stable_eval(x, y));
    check("gp_stable_symmetry", es < 1e-10, es);
    const Kernel helm = Kernel::make_helmholtz(ModeGrid{8}, 1.3, cfg.medium);
    const double eh = std::abs(helm.stable_eval(x, y) - helm.stable_eval(y, x)) /
                      std::abs(helm.stable_eval(x, y));
    check("helmholtz_stable_symmetry", eh < 1e-8, eh);
  }
  // xi invariants (relative)
  {
    double worst = 0.0;
    for (const Index3& l : {Index3{1, 0, 0}, Index3{0, 0, 1}, Index3{2, -1, 3}}) {
      const Vector3c xi = make_xi(l, 4.0, 1.0);
      const cplx nullv = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
      const double n2v = std::norm(xi[0]) + std::norm(xi[1]) + std::norm(xi[2]);
      worst = std::max(worst, std::abs(nullv) / n2v);
    }
    check("xi_null_invariant", worst < 1e-12, worst);
  }
  // ball spectrum fundamental eigenvalue
  {
    const NewtonianSpectrum spec = solve_ball_spectrum(160, 1, 2);
    const double lam = spec.radial_modes()[0]->lambda;
    const double err = std::abs(lam - 4.0 / (pi * pi));
    check("ball_lambda1", err < 1e-3, err);
    const ResonanceParams rp =
        make_resonance(spec, 0, cfg.c_n0, cfg.k0, cfg.rho0, 0.05, 0.5, cfg.medium.max_norm());
    check("dispersion_identity", std::abs(rp.dispersion_residual()) < 1e-14,
          std::abs(rp.dispersion_residual()));
  }
  res.status = failures == 0 ? 0 : 1;
  return res;
}

}  // namespace

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["experiment"] = experiment;
  j["grid_n"] = grid_n;
  j["n0"] = n0;
  j["c_n0"] = c_n0;
  j["k0"] = k0;
  j["rho0"] = rho0;
  j["kappa"] = kappa;
  j["h"] = h;
  j["lattice_margin"] = lattice_margin;
  j["a_list"] = a_list;
  j["p_list"] = p_list;
  j["sigma"] = sigma;
  j["L"] = L;
  j["omega"] = omega;
  j["medium"] = medium_to_json(medium);
  j["spectra_resolution"] = spectra_resolution;
  j["spectra_lmax"] = spectra_lmax;
  j["spectra_nradial"] = spectra_nradial;
  j["pairs"] = pairs;
  j["nvox"] = nvox;
  j["mode"] = mode;
  j["n_meas"] = n_meas;
  return j.dump();
}

std::uint64_t ExperimentConfig::config_hash() const { return fnv1a64(canonical_json()); }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw invalid_config(std::string("config: not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  const std::vector<std::string> known = {
      "experiment", "grid_n", "n0", "c_n0", "k0", "rho0", "kappa", "h", "lattice_margin",
      "a_list", "p_list", "sigma", "L", "omega", "medium", "spectra_resolution", "spectra_lmax",
      "spectra_nradial", "pairs", "nvox", "mode", "n_meas", "threads", "out_dir"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw invalid_config("config: unknown key '" + key + "'");
  }
  cfg.experiment = j.value("experiment", cfg.experiment);
  cfg.grid_n = j.value("grid_n", cfg.grid_n);
  cfg.n0 = j.value("n0", cfg.n0);
  cfg.c_n0 = j.value("c_n0", cfg.c_n0);
  cfg.k0 = j.value("k0", cfg.k0);
  cfg.rho0 = j.value("rho0", cfg.rho0);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.h = j.value("h", cfg.h);
  cfg.lattice_margin = j.value("lattice_margin", cfg.lattice_margin);
  if (j.contains("a_list")) cfg.a_list = j.at("a_list").get<std::vector<double>>();
  if (j.contains("p_list")) cfg.p_list = j.at("p_list").get<std::vector<double>>();
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.L = j.value("L", cfg.L);
  cfg.omega = j.value("omega", cfg.omega);
  if (j.contains("medium")) cfg.medium = medium_from_json(j.at("medium"));
  cfg.spectra_resolution = j.value("spectra_resolution", cfg.spectra_resolution);
  cfg.spectra_lmax = j.value("spectra_lmax", cfg.spectra_lmax);
  cfg.spectra_nradial = j.value("spectra_nradial", cfg.spectra_nradial);
  cfg.pairs = j.value("pairs", cfg.pairs);
  cfg.nvox = j.value("nvox", cfg.nvox);
  cfg.mode = j.value("mode", cfg.mode);
  cfg.n_meas = j.value("n_meas", cfg.n_meas);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);

  // validation against module preconditions
  if (std::find(known_experiments.begin(), known_experiments.end(), cfg.experiment) ==
      known_experiments.end())
    throw invalid_config("config: unknown experiment '" + cfg.experiment + "'");
  if (cfg.grid_n < 4 || cfg.grid_n > 32)
    throw invalid_config("config: grid_n must lie in [4, 32]");
  if (!(cfg.c_n0 < 0.0))
    throw invalid_config("config: the detuning constant c_n0 must be negative (got " +
                         format_double(cfg.c_n0) +
                         "); the resonance construction requires c_n0 < 0");
  if (!(cfg.k0 > 0.0 && cfg.rho0 > 0.0)) throw invalid_config("config: k0, rho0 must be positive");
  if (!(cfg.h >= 0.0 && cfg.h < 1.0)) throw invalid_config("config: h must lie in [0, 1)");
  if (!(cfg.kappa > 0.0)) throw invalid_config("config: kappa must be positive");
  if (cfg.a_list.empty()) throw invalid_config("config: a_list must not be empty");
  for (double a : cfg.a_list)
    if (!(a > 0.0 && a < lattice_a_max(cfg.h, cfg.kappa)))
      throw invalid_config("config: a = " + format_double(a) + " outside (0, a_max = " +
                           format_double(lattice_a_max(cfg.h, cfg.kappa)) + ")");
  if (cfg.p_list.empty()) throw invalid_config("config: p_list must not be empty");
  for (double p : cfg.p_list)
    if (!(p > 0.0)) throw invalid_config("config: P values must be positive");
  if (!(cfg.sigma > 0.0)) throw invalid_config("config: sigma must be positive");
  if (cfg.L < 1) throw invalid_config("config: L must be >= 1");
  if (!(cfg.omega > 0.0)) throw invalid_config("config: omega must be positive");
  if (cfg.pairs < 1 || cfg.pairs > 48) throw invalid_config("config: pairs must lie in [1, 48]");
  if (cfg.nvox < 3) throw invalid_config("config: nvox must be >= 3");
  if (cfg.mode != "oracle" && cfg.mode != "measurement")
    throw invalid_config("config: mode must be 'oracle' or 'measurement'");
  if (cfg.n_meas < 8 || cfg.n_meas > 64)
    throw invalid_config("config: n_meas must lie in [8, 64]");
  if (cfg.experiment == "linearize" || cfg.experiment == "reconstruct") {
    for (double p : cfg.p_list) {
      const double ratio = cfg.omega * cfg.omega * cfg.medium.max_norm() / (p * p);
      if (!(ratio < 1.0))
        throw invalid_config("config: Born smallness omega^2 ||n^2||/P^2 = " +
                             format_double(ratio) + " >= 1 at P = " + format_double(p));
    }
  }
  if (cfg.experiment == "reconstruct" && cfg.mode == "measurement") {
    for (double p : cfg.p_list)
      for (int l1 = -cfg.L; l1 <= cfg.L; ++l1)
        for (int l2 = -cfg.L; l2 <= cfg.L; ++l2)
          for (int l3 = -cfg.L; l3 <= cfg.L; ++l3) {
            const Vector3c xi = make_xi({l1, l2, l3}, p, cfg.sigma);
            const double xr = (pi / 2.0) * (std::abs(xi[0].imag()) + std::abs(xi[1].imag()) +
                                            std::abs(xi[2].imag()));
            if (xr > 14.0)
              throw invalid_config(
                  "config: measurement mode needs P^(2+sigma)|l|^(3+sigma) small enough for the "
                  "conjugated emulation; got exponent range " +
                  format_double(xr) + " > 14 at P = " + format_double(p));
          }
  }
  return cfg;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      line += '"';
      for (char ch : c) {
        if (ch == '"') line += '"';
        line += ch;
      }
      line += '"';
    } else {
      line += c;
    }
  }
  buffer_ += line + "\r\n";
  flush();
}

void CsvWriter::flush() {
  // rewrite whole file; row counts are small and re-runs stay byte-identical
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  out << buffer_;
  flushed_ = true;
}

void emit_plotdata(const std::string& path, const std::vector<std::string>& x,
                   const std::vector<std::string>& quantity, const std::vector<double>& value) {
  if (x.size() != quantity.size() || x.size() != value.size())
    throw std::invalid_argument("emit_plotdata: column length mismatch");
  CsvWriter w(path, {"x", "quantity", "value"});
  for (std::size_t i = 0; i < x.size(); ++i)
    w.row({x[i], quantity[i], CsvWriter::cell(value[i])});
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  RunResult res;
  try {
    if (cfg.experiment == "spectra")
      res = run_spectra(cfg);
    else if (cfg.experiment == "forward")
      res = run_forward(cfg);
    else if (cfg.experiment == "converge")
      res = run_converge(cfg);
    else if (cfg.experiment == "linearize")
      res = run_linearize(cfg);
    else if (cfg.experiment == "reconstruct")
      res = run_reconstruct(cfg);
    else if (cfg.experiment == "selftest")
      res = run_selftest(cfg);
    else
      throw invalid_config("run_experiment: unknown experiment " + cfg.experiment);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    res.status = 2;
  }
  write_manifest(cfg, res);
  return res;
}

}  // namespace dlab
