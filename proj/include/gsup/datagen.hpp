#pragma once

#include <cstdint>
#include <vector>

#include "gsup/types.hpp"

namespace gsup {

struct LabeledData {
  DataMatrix data;
  Labels truth;
};

/// pi0 N(mu0, I2) + sum_{k=1..3} (1 - pi0)/3 N(mu_k, I2) with mu0 = (0,0),
/// mu1 = (c,c), mu2 = (c,-2c), mu3 = (-c,0).
struct MixtureSpec {
  double c = 4.0;
  double pi0 = 0.8;
  int n = 100;
  std::uint64_t seed = 0;

  /// pi0 in (0, 1]; pi0 = 1 is the degenerate single-component case.
  void validate() const;
};

LabeledData gen_mixture(const MixtureSpec& spec);

/// Component means of the four-component design, row k = mu_k.
DataMatrix mixture_means(double c);

inline constexpr int kToyNoiseLabel = 2;

/// 10 points around (0,0) (label 0), 10 around (2.355, 2.355) (label 1) and 20
/// noise points uniform on the annulus of radii [4, 6] centred at their midpoint
/// (label 2), in that order.
LabeledData gen_toy(std::uint64_t seed);

/// One ring of an image template: a radial Gaussian profile at `radius` modulated
/// by cos(harmonic * theta + phase).
struct RingComponent {
  double radius;
  double width;
  int harmonic;
  double phase;
};

using ImageTemplate = std::vector<RingComponent>;

/// Renders a template on a side x side grid (row-major, row 0 at the top), rotated
/// clockwise by angle_deg about the image center.
Vector render_template(const ImageTemplate& t, int side, double angle_deg = 0.0);

/// A bank of n mutually dissimilar templates. Candidates are drawn from the seed;
/// a greedy pass keeps those whose correlation with every chosen template, and of
/// every rotated copy (angles in `angles_deg`) with every chosen template, is smallest.
std::vector<ImageTemplate> make_template_bank(int n, int side, const std::vector<double>& angles_deg,
                                              std::uint64_t seed);

struct ImageSimSpec {
  int n_templates = 16;
  int image_side = 16;
  int n_images = 800;
  /// Noise standard deviation. When <= 0 it is derived from target_snr.
  double sigma_eps = 0.0;
  double target_snr = 0.19;
  double misalign_frac = 0.0;
  std::vector<double> rotation_angles{7.2, 14.4, 21.6, 28.8, 36.0, 43.2};
  std::uint64_t seed = 0;

  void validate() const;
};

struct ImageData {
  /// n_images x side^2, one flattened image per row.
  DataMatrix images;
  /// Template id for aligned images; every misaligned image gets its own id >= n_templates.
  Labels truth;
  /// Template each image was drawn from.
  Labels view;
  std::vector<bool> misaligned;
  std::vector<double> angle_deg;
  /// Noise-free templates, one per row.
  DataMatrix templates;
  double sigma_eps = 0.0;
  /// Pixel variance of the noise-free sampled images over sigma_eps^2.
  double realized_snr = 0.0;
};

ImageData gen_images(const ImageSimSpec& spec);

}  // namespace gsup
