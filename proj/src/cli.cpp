#include "gsup/cli.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsup/baselines.hpp"
#include "gsup/datagen.hpp"
#include "gsup/error.hpp"
#include "gsup/gammasup.hpp"
#include "gsup/io.hpp"
#include "gsup/metrics.hpp"
#include "gsup/reduce.hpp"
#include "gsup/tuning.hpp"

namespace gsup::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

/// key=value lines.
class Report {
 public:
  explicit Report(std::ostream& os) : os_(os) {}
  Report& kv(const std::string& key, const std::string& v) {
    os_ << key << '=' << v << '\n';
    return *this;
  }
  Report& kv(const std::string& key, const char* v) { return kv(key, std::string(v)); }
  Report& kv(const std::string& key, double v) { return kv(key, fmt(v)); }
  Report& kv(const std::string& key, bool v) { return kv(key, v ? "true" : "false"); }
  template <typename I>
    requires std::is_integral_v<I>
  Report& kv(const std::string& key, I v) {
    return kv(key, std::to_string(v));
  }

 private:
  std::ostream& os_;
};

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  p.replace_extension(suffix);
  return p;
}

struct SimulateOpts {
  std::string kind;
  std::string out;
  std::string truth;
  std::string mask;
  std::uint64_t seed = 0;
  MixtureSpec mixture;
  ImageSimSpec images;
};

struct ClusterOpts {
  std::string method;
  std::string data;
  std::string labels_out;
  std::string centers_out;
  double tau = 0.0;
  double s = TuningParams{}.s;
  double conv_eps = tol::kConvEps;
  double merge_eps = tol::kMergeEps;
  int max_iter = tol::kMaxIter;
  std::size_t size_threshold = 0;
  KMeansConfig kmeans;
  int threads = 0;
};

struct ScanOpts {
  std::string data;
  std::string out;
  double s = TuningParams{}.s;
  std::vector<double> taus;
  double tau_min = 0.0;
  double tau_max = 0.0;
  int points = 40;
  double conv_eps = tol::kConvEps;
  double merge_eps = tol::kMergeEps;
  int max_iter = tol::kMaxIter;
  int threads = 0;
};

struct EvaluateOpts {
  std::string truth;
  std::string predicted;
};

struct ReduceOpts {
  std::string data;
  std::string out;
  std::string method = "pca";
  std::string model_out;
  int rank = 0;
  int r1 = 0;
  int r2 = 0;
  int sweeps = kDefaultMpcaSweeps;
  bool correlation = false;
};

GammaSupConfig gsup_config(double s, double tau, double conv_eps, double merge_eps, int max_iter, int threads) {
  GammaSupConfig cfg;
  cfg.params = TuningParams{s, tau};
  cfg.conv_eps = conv_eps;
  cfg.merge_eps = merge_eps;
  cfg.max_iter = max_iter;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

void run_simulate(const SimulateOpts& o, Report& rep) {
  const fs::path out(o.out);
  const fs::path truth = o.truth.empty() ? sibling(out, ".labels") : fs::path(o.truth);
  rep.kv("command", "simulate").kv("kind", o.kind).kv("seed", o.seed).kv("out", out.string()).kv("truth", truth.string());
  if (o.kind == "mixture") {
    MixtureSpec spec = o.mixture;
    spec.seed = o.seed;
    const auto d = gen_mixture(spec);
    rep.kv("c", spec.c).kv("pi0", spec.pi0).kv("n", spec.n);
    io::write_matrix(out, d.data);
    io::write_labels(truth, d.truth);
  } else if (o.kind == "toy") {
    const auto d = gen_toy(o.seed);
    rep.kv("n", d.data.rows());
    io::write_matrix(out, d.data);
    io::write_labels(truth, d.truth);
  } else {
    ImageSimSpec spec = o.images;
    spec.seed = o.seed;
    const auto d = gen_images(spec);
    const fs::path mask = o.mask.empty() ? sibling(out, ".mask") : fs::path(o.mask);
    rep.kv("templates", spec.n_templates)
        .kv("side", spec.image_side)
        .kv("n", spec.n_images)
        .kv("misalign_frac", spec.misalign_frac)
        .kv("target_snr", spec.target_snr)
        .kv("sigma_eps", d.sigma_eps)
        .kv("realized_snr", d.realized_snr)
        .kv("mask", mask.string());
    if (io::format_from_path(out) == io::MatrixFormat::csv) {
      io::write_csv(out, d.images);
    } else {
      io::write_image_stack(out, ImageStack{d.images, spec.image_side, spec.image_side});
    }
    io::write_labels(truth, d.truth);
    Labels m(d.misaligned.begin(), d.misaligned.end());
    io::write_labels(mask, m);
  }
}

void run_cluster(const ClusterOpts& o, Report& rep) {
  const DataMatrix data = io::read_matrix(o.data);
  const fs::path labels_out = o.labels_out.empty() ? sibling(o.data, ".pred") : fs::path(o.labels_out);
  const fs::path centers_out = o.centers_out.empty() ? sibling(o.data, ".centers.csv") : fs::path(o.centers_out);
  rep.kv("command", "cluster").kv("method", o.method).kv("data", o.data).kv("n", data.rows()).kv("p", data.cols());
  rep.kv("threads", o.threads);

  ClusterResult res;
  if (o.method == "kmeans" || o.method == "kmeans-plus") {
    KMeansConfig cfg = o.kmeans;
    cfg.threads = o.threads;
    cfg.validate();
    rep.kv("k", cfg.k).kv("n_init", cfg.n_init).kv("max_iter", cfg.max_iter).kv("seed", cfg.seed);
    KMeansResult km;
    if (o.method == "kmeans") {
      km = kmeans(data, cfg);
    } else {
      rep.kv("dismiss_threshold", cfg.dismiss_threshold);
      km = kmeans_plus(data, cfg);
    }
    rep.kv("wcss", km.wcss);
    res = std::move(km.clusters);
  } else {
    const auto cfg = gsup_config(o.s, o.tau, o.conv_eps, o.merge_eps, o.max_iter, o.threads);
    rep.kv("s", o.s).kv("tau", o.tau).kv("conv_eps", o.conv_eps).kv("merge_eps", o.merge_eps).kv("max_iter", o.max_iter);
    if (o.method == "gsup") {
      res = gamma_sup(data, cfg);
    } else if (o.method == "gsup-nb") {
      res = gamma_nonblurring(data, cfg);
    } else {
      rep.kv("size_threshold", o.size_threshold);
      res = gamma_sup_plus(data, cfg, o.size_threshold);
    }
  }
  io::write_labels(labels_out, res.labels);
  io::write_matrix(centers_out, res.centers);
  rep.kv("K", res.num_clusters())
      .kv("iterations", res.iterations)
      .kv("converged", res.converged)
      .kv("labels_out", labels_out.string())
      .kv("centers_out", centers_out.string());
}

void run_scan(const ScanOpts& o, Report& rep) {
  const DataMatrix data = io::read_matrix(o.data);
  std::vector<double> taus = o.taus;
  std::string grid = "list";
  if (taus.empty()) {
    if (o.tau_min > 0.0 || o.tau_max > 0.0) {
      taus = log_grid(o.tau_min, o.tau_max, o.points);
      grid = "log";
    } else {
      taus = default_tau_grid(data, o.points, o.threads);
      grid = "default";
    }
  }
  const auto base = gsup_config(o.s, 1.0, o.conv_eps, o.merge_eps, o.max_iter, o.threads);
  const auto scan = scan_tau(data, o.s, taus, base);
  const fs::path out = o.out.empty() ? sibling(o.data, ".scan.csv") : fs::path(o.out);
  {
    std::ofstream os(out);
    if (!os) throw IoError("cannot open for writing: " + out.string());
    os << "tau,K\n";
    for (std::size_t i = 0; i < scan.taus.size(); ++i) os << fmt(scan.taus[i]) << ',' << scan.counts[i] << '\n';
  }
  rep.kv("command", "scan")
      .kv("data", o.data)
      .kv("n", data.rows())
      .kv("s", o.s)
      .kv("grid", grid)
      .kv("points", scan.taus.size())
      .kv("tau_first", scan.taus.front())
      .kv("tau_last", scan.taus.back())
      .kv("conv_eps", o.conv_eps)
      .kv("merge_eps", o.merge_eps)
      .kv("max_iter", o.max_iter)
      .kv("threads", o.threads)
      .kv("out", out.string());
  rep.kv("transition_tau", scan.transition_tau ? fmt(*scan.transition_tau) : "none");
  if (scan.plateau) {
    rep.kv("plateau_k", scan.plateau->k).kv("plateau_length", scan.plateau->length());
    rep.kv("recommended_tau", *scan.recommended_tau);
  } else {
    rep.kv("plateau_k", "none").kv("recommended_tau", "none");
  }
}

void run_evaluate(const EvaluateOpts& o, Report& rep) {
  const Labels truth = io::read_labels(o.truth);
  const Labels pred = io::read_labels(o.predicted);
  if (truth.size() != pred.size()) {
    throw DimensionError("label files differ in length: " + std::to_string(truth.size()) + " vs " +
                         std::to_string(pred.size()));
  }
  rep.kv("command", "evaluate").kv("truth", o.truth).kv("predicted", o.predicted);
  rep.kv("n", truth.size())
      .kv("K_true", distinct_count(truth))
      .kv("K_pred", distinct_count(pred))
      .kv("purity", purity_number(truth, pred))
      .kv("impurity", impurity(truth, pred))
      .kv("c_impurity", c_impurity(truth, pred));
}

void run_reduce(const ReduceOpts& o, Report& rep) {
  rep.kv("command", "reduce").kv("method", o.method).kv("data", o.data).kv("out", o.out);
  if (o.method == "pca") {
    const DataMatrix data = io::read_matrix(o.data);
    const auto res = pca_fit_project(data, o.rank, o.correlation);
    io::write_matrix(o.out, res.scores);
    rep.kv("rank", o.rank).kv("correlation", o.correlation).kv("explained_variance", res.explained_variance_ratio.sum());
  } else {
    const ImageStack stack = io::read_image_stack(o.data);
    const auto model = mpca_fit(stack, o.r1, o.r2, o.sweeps);
    io::write_matrix(o.out, mpca_project(model, stack));
    if (!o.model_out.empty()) io::write_mpca_model(o.model_out, model);
    rep.kv("d1", stack.d1).kv("d2", stack.d2).kv("r1", o.r1).kv("r2", o.r2).kv("sweeps", model.sweeps);
    rep.kv("reconstruction_mse", model.error_trace.back());
    if (!o.model_out.empty()) rep.kv("model_out", o.model_out);
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gamma-SUP clustering toolkit"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  simulate->add_option("kind", sim.kind, "mixture | toy | images")
      ->required()
      ->check(CLI::IsMember({"mixture", "toy", "images"}));
  simulate->add_option("--out", sim.out, "data file (.csv or raw)")->required();
  simulate->add_option("--truth", sim.truth, "truth label file (default: --out with extension .labels)");
  simulate->add_option("--mask", sim.mask, "misalignment mask file for images (default: --out with extension .mask)");
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--c", sim.mixture.c, "mixture separation");
  simulate->add_option("--pi0", sim.mixture.pi0, "weight of the main component");
  simulate->add_option("--n", sim.mixture.n, "mixture sample size");
  simulate->add_option("--templates", sim.images.n_templates);
  simulate->add_option("--side", sim.images.image_side);
  simulate->add_option("--images", sim.images.n_images);
  simulate->add_option("--sigma-eps", sim.images.sigma_eps, "pixel noise sd (overrides --snr)");
  simulate->add_option("--snr", sim.images.target_snr, "signal variance over noise variance");
  simulate->add_option("--misalign", sim.images.misalign_frac, "fraction of rotated images");

  ClusterOpts cl;
  auto* cluster = app.add_subcommand("cluster", "cluster a data matrix");
  cluster->add_option("method", cl.method, "gsup | gsup-nb | gsup-plus | kmeans | kmeans-plus")
      ->required()
      ->check(CLI::IsMember({"gsup", "gsup-nb", "gsup-plus", "kmeans", "kmeans-plus"}));
  cluster->add_option("data", cl.data)->required()->check(CLI::ExistingFile);
  cluster->add_option("--labels-out", cl.labels_out, "default: data with extension .pred");
  cluster->add_option("--centers-out", cl.centers_out, "default: data with extension .centers.csv");
  auto* tau_opt = cluster->add_option("--tau", cl.tau);
  cluster->add_option("--s", cl.s);
  cluster->add_option("--conv-eps", cl.conv_eps);
  cluster->add_option("--merge-eps", cl.merge_eps);
  cluster->add_option("--max-iter", cl.max_iter);
  cluster->add_option("--size-threshold", cl.size_threshold, "gsup-plus: bisect clusters larger than this");
  cluster->add_option("--k", cl.kmeans.k);
  auto* seed_opt = cluster->add_option("--seed", cl.kmeans.seed);
  cluster->add_option("--n-init", cl.kmeans.n_init);
  cluster->add_option("--dismiss", cl.kmeans.dismiss_threshold);
  cluster->add_option("--threads", cl.threads);

  ScanOpts sc;
  auto* scan = app.add_subcommand("scan", "cluster counts over a tau grid");
  scan->add_option("data", sc.data)->required()->check(CLI::ExistingFile);
  scan->add_option("--out", sc.out, "K-vs-tau csv (default: data with extension .scan.csv)");
  scan->add_option("--s", sc.s);
  auto* taus_opt = scan->add_option("--taus", sc.taus, "explicit ascending grid")->delimiter(',');
  scan->add_option("--tau-min", sc.tau_min);
  scan->add_option("--tau-max", sc.tau_max);
  scan->add_option("--points", sc.points);
  scan->add_option("--conv-eps", sc.conv_eps);
  scan->add_option("--merge-eps", sc.merge_eps);
  scan->add_option("--max-iter", sc.max_iter);
  scan->add_option("--threads", sc.threads);

  EvaluateOpts ev;
  auto* evaluate = app.add_subcommand("evaluate", "purity metrics of a predicted labelling");
  evaluate->add_option("truth", ev.truth)->required()->check(CLI::ExistingFile);
  evaluate->add_option("predicted", ev.predicted)->required()->check(CLI::ExistingFile);

  ReduceOpts rd;
  auto* reduce = app.add_subcommand("reduce", "PCA or 2-mode MPCA");
  reduce->add_option("data", rd.data)->required()->check(CLI::ExistingFile);
  reduce->add_option("--out", rd.out)->required();
  reduce->add_option("--method", rd.method)->check(CLI::IsMember({"pca", "mpca"}));
  reduce->add_option("--rank", rd.rank, "pca: output dimension");
  reduce->add_flag("--correlation", rd.correlation, "pca on the correlation matrix");
  reduce->add_option("--r1", rd.r1, "mpca: row-mode rank");
  reduce->add_option("--r2", rd.r2, "mpca: column-mode rank");
  reduce->add_option("--sweeps", rd.sweeps);
  reduce->add_option("--model-out", rd.model_out);

  try {
    app.parse(argc, argv);
    if (cluster->parsed()) {
      const bool gsup_family = cl.method.rfind("gsup", 0) == 0;
      if (gsup_family && tau_opt->count() == 0) throw CLI::RequiredError("--tau");
      if (!gsup_family && seed_opt->count() == 0) throw CLI::RequiredError("--seed");
      if (cl.method == "gsup-plus" && cl.size_threshold == 0) throw CLI::RequiredError("--size-threshold");
    }
    if (scan->parsed() && taus_opt->count() > 0 && sc.taus.empty()) throw CLI::ValidationError("--taus", "empty grid");
    if (reduce->parsed()) {
      if (rd.method == "pca" && rd.rank == 0) throw CLI::RequiredError("--rank");
      if (rd.method == "mpca" && (rd.r1 == 0 || rd.r2 == 0)) throw CLI::RequiredError("--r1 and --r2");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  // Reports are buffered so that a failed run prints only the diagnostic.
  std::ostringstream buffer;
  Report rep(buffer);
  try {
    if (simulate->parsed()) run_simulate(sim, rep);
    if (cluster->parsed()) run_cluster(cl, rep);
    if (scan->parsed()) run_scan(sc, rep);
    if (evaluate->parsed()) run_evaluate(ev, rep);
    if (reduce->parsed()) run_reduce(rd, rep);
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << buffer.str();
  return kExitOk;
}

}  // namespace gsup::cli
