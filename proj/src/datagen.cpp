#include "gsup/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gsup/error.hpp"
#include "gsup/rng.hpp"

namespace gsup {

namespace {

constexpr double kToyOffset = 2.355;
constexpr double kAnnulusInner = 4.0;
constexpr double kAnnulusOuter = 6.0;

// Ring layout of the procedural templates: radii as fractions of the half side,
// with the admissible harmonic range per ring.
struct RingSlot {
  double radius_frac;
  double width_frac;
  int min_harmonic;
  int max_harmonic;
};
constexpr RingSlot kRingSlots[] = {{0.507, 0.093, 6, 10}, {0.72, 0.093, 9, 15}, {0.933, 0.093, 12, 18}};
constexpr int kCandidatePool = 3000;
constexpr double kMaxSelfCorrelation = 0.35;

double variance(const DataMatrix& m) {
  const double mean = m.mean();
  return (m.array() - mean).square().sum() / static_cast<double>(m.size());
}

Vector centered_unit(Vector v) {
  v.array() -= v.mean();
  const double norm = v.norm();
  return norm > 0.0 ? Vector(v / norm) : v;
}

}  // namespace

void MixtureSpec::validate() const {
  if (!(pi0 > 0.0 && pi0 <= 1.0)) throw DomainError("pi0 must lie in (0, 1]");
  if (n < 1) throw DomainError("mixture sample size must be >= 1");
  if (!std::isfinite(c)) throw DomainError("separation c must be finite");
}

DataMatrix mixture_means(double c) {
  DataMatrix mu(4, 2);
  mu << 0.0, 0.0, c, c, c, -2.0 * c, -c, 0.0;
  return mu;
}

LabeledData gen_mixture(const MixtureSpec& spec) {
  spec.validate();
  CounterRng rng(spec.seed);
  const DataMatrix mu = mixture_means(spec.c);
  const double noise_w = (1.0 - spec.pi0) / 3.0;
  LabeledData out;
  out.data.resize(spec.n, 2);
  out.truth.resize(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.uniform();
    int label = 0;
    if (u >= spec.pi0) label = std::min(3, 1 + static_cast<int>((u - spec.pi0) / noise_w));
    out.truth[static_cast<std::size_t>(i)] = label;
    out.data(i, 0) = mu(label, 0) + rng.normal();
    out.data(i, 1) = mu(label, 1) + rng.normal();
  }
  return out;
}

LabeledData gen_toy(std::uint64_t seed) {
  CounterRng rng(seed);
  LabeledData out;
  out.data.resize(40, 2);
  out.truth.resize(40);
  for (int i = 0; i < 20; ++i) {
    const double offset = i < 10 ? 0.0 : kToyOffset;
    out.data(i, 0) = offset + rng.normal();
    out.data(i, 1) = offset + rng.normal();
    out.truth[static_cast<std::size_t>(i)] = i < 10 ? 0 : 1;
  }
  const double mid = 0.5 * kToyOffset;
  for (int i = 20; i < 40; ++i) {
    const double r = std::sqrt(rng.uniform(kAnnulusInner * kAnnulusInner, kAnnulusOuter * kAnnulusOuter));
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out.data(i, 0) = mid + r * std::cos(theta);
    out.data(i, 1) = mid + r * std::sin(theta);
    out.truth[static_cast<std::size_t>(i)] = kToyNoiseLabel;
  }
  return out;
}

Vector render_template(const ImageTemplate& t, int side, double angle_deg) {
  const double center = 0.5 * (side - 1);
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  Vector img = Vector::Zero(static_cast<Eigen::Index>(side) * side);
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const double x = col - center;
      const double y = center - row;
      // Sampling the template at counter-clockwise rotated coordinates turns the
      // picture clockwise.
      const double xr = ca * x - sa * y;
      const double yr = sa * x + ca * y;
      const double r = std::hypot(xr, yr);
      const double theta = std::atan2(yr, xr);
      double v = 0.0;
      for (const auto& ring : t) {
        const double dr = (r - ring.radius) / ring.width;
        v += std::exp(-0.5 * dr * dr) * std::cos(ring.harmonic * theta + ring.phase);
      }
      img(static_cast<Eigen::Index>(row) * side + col) = v;
    }
  }
  return img;
}

std::vector<ImageTemplate> make_template_bank(int n, int side, const std::vector<double>& angles_deg,
                                              std::uint64_t seed) {
  if (n < 1) throw DomainError("template bank needs n >= 1");
  if (side < 8) throw DomainError("templates need image_side >= 8");
  CounterRng rng(seed, 0x7e3a11e5ULL);
  const double half = 0.5 * side;

  struct Candidate {
    ImageTemplate t;
    Vector base;
    std::vector<Vector> rotated;
    double self = 0.0;
  };
  std::vector<Candidate> pool;
  const int draws = std::max(kCandidatePool, 40 * n);
  for (int d = 0; d < draws; ++d) {
    Candidate c;
    for (const auto& slot : kRingSlots) {
      const int span = slot.max_harmonic - slot.min_harmonic + 1;
      c.t.push_back(RingComponent{slot.radius_frac * half, slot.width_frac * half,
                                  slot.min_harmonic + static_cast<int>(rng.index(static_cast<std::uint64_t>(span))),
                                  2.0 * std::numbers::pi * rng.uniform()});
    }
    c.base = centered_unit(render_template(c.t, side));
    for (double a : angles_deg) {
      c.rotated.push_back(centered_unit(render_template(c.t, side, a)));
      c.self = std::max(c.self, c.rotated.back().dot(c.base));
    }
    if (c.self < kMaxSelfCorrelation || angles_deg.empty()) pool.push_back(std::move(c));
  }
  if (static_cast<int>(pool.size()) < n) throw DomainError("template bank: not enough admissible candidates");

  auto worst_against = [](const Candidate& a, const Candidate& b) {
    double w = std::abs(a.base.dot(b.base));
    for (const auto& r : a.rotated) w = std::max(w, r.dot(b.base));
    for (const auto& r : b.rotated) w = std::max(w, r.dot(a.base));
    return w;
  };

  std::vector<Candidate> chosen;
  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) score[i] = pool[i].self;
  std::vector<bool> used(pool.size(), false);
  while (static_cast<int>(chosen.size()) < n) {
    std::size_t best = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!used[i] && (best == pool.size() || score[i] < score[best])) best = i;
    }
    used[best] = true;
    chosen.push_back(pool[best]);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!used[i]) score[i] = std::max(score[i], worst_against(pool[i], chosen.back()));
    }
  }
  std::vector<ImageTemplate> bank;
  for (auto& c : chosen) bank.push_back(std::move(c.t));
  return bank;
}

void ImageSimSpec::validate() const {
  if (n_templates < 1) throw DomainError("n_templates must be >= 1");
  if (image_side < 8) throw DomainError("image_side must be >= 8");
  if (n_images < 1) throw DomainError("n_images must be >= 1");
  if (!(misalign_frac >= 0.0 && misalign_frac < 1.0)) throw DomainError("misalign_frac must lie in [0, 1)");
  if (misalign_frac > 0.0 && rotation_angles.empty()) throw DomainError("misalignment needs rotation angles");
  if (!(sigma_eps > 0.0) && !(target_snr > 0.0)) throw DomainError("need sigma_eps > 0 or target_snr > 0");
}

ImageData gen_images(const ImageSimSpec& spec) {
  spec.validate();
  const int side = spec.image_side;
  const Eigen::Index pixels = static_cast<Eigen::Index>(side) * side;
  const auto bank = make_template_bank(spec.n_templates, side, spec.rotation_angles, spec.seed);

  ImageData out;
  out.templates.resize(spec.n_templates, pixels);
  for (int k = 0; k < spec.n_templates; ++k) out.templates.row(k) = render_template(bank[static_cast<std::size_t>(k)], side).transpose();
  out.sigma_eps = spec.sigma_eps > 0.0 ? spec.sigma_eps : std::sqrt(variance(out.templates) / spec.target_snr);

  CounterRng rng(spec.seed, 1);
  const auto n = static_cast<std::size_t>(spec.n_images);
  out.view.resize(n);
  for (auto& v : out.view) v = static_cast<int>(rng.index(static_cast<std::uint64_t>(spec.n_templates)));

  // Exactly round(frac * n) images are rotated, chosen without replacement.
  const auto n_mis = static_cast<std::size_t>(std::llround(spec.misalign_frac * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_mis; ++i) std::swap(perm[i], perm[i + rng.index(n - i)]);
  out.misaligned.assign(n, false);
  for (std::size_t i = 0; i < n_mis; ++i) out.misaligned[perm[i]] = true;

  out.angle_deg.assign(n, 0.0);
  out.truth.resize(n);
  int next_singleton = spec.n_templates;
  // Angles not yet used by a rotated copy of each view; a misaligned image draws
  // from these first so that singletons are distinct while possible.
  std::vector<std::vector<double>> unused(static_cast<std::size_t>(spec.n_templates), spec.rotation_angles);
  DataMatrix clean(static_cast<Eigen::Index>(n), pixels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = bank[static_cast<std::size_t>(out.view[i])];
    if (out.misaligned[i]) {
      auto& pool = unused[static_cast<std::size_t>(out.view[i])];
      if (pool.empty()) {
        out.angle_deg[i] = spec.rotation_angles[rng.index(spec.rotation_angles.size())];
      } else {
        const auto pick = static_cast<std::size_t>(rng.index(pool.size()));
        out.angle_deg[i] = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      clean.row(static_cast<Eigen::Index>(i)) = render_template(t, side, out.angle_deg[i]).transpose();
      out.truth[i] = next_singleton++;
    } else {
      clean.row(static_cast<Eigen::Index>(i)) = out.templates.row(out.view[i]);
      out.truth[i] = out.view[i];
    }
  }
  out.realized_snr = variance(clean) / (out.sigma_eps * out.sigma_eps);

  CounterRng noise(spec.seed, 2);
  out.images = clean;
  for (Eigen::Index i = 0; i < out.images.rows(); ++i) {
    for (Eigen::Index c = 0; c < pixels; ++c) out.images(i, c) += out.sigma_eps * noise.normal();
  }
  return out;
}

}  // namespace gsup
