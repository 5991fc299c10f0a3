#pragma once

#include <cstdint>
#include <vector>

#include "dwiseg/features.hpp"
#include "dwiseg/volume.hpp"

namespace dwiseg {

/// Shared supervised-training knobs. The learning rate decays as
/// eta(t) = eta0 / (1 + t / tau) over epochs t, with tau = max_iters / 2
/// unless set explicitly. `eps` is the stopping threshold on the epoch mean
/// squared error (averaged over samples and output units).
struct TrainConfig {
    double eta0 = 0.1;
    double eps = 0.05;
    int max_iters = 200;
    std::uint64_t seed = 0;
    double tau = 0.0; // 0 = max_iters / 2

    void validate() const;
    double eta(int epoch) const;
};

// ---------------------------------------------------------------------------
// Models. All are plain parameter holders; training functions return them
// and classification reads them, so trained models are safe to share
// read-only across threads.
// ---------------------------------------------------------------------------

/// Two-layer perceptron, logistic sigmoid on both layers.
struct MlpModel {
    int bands = 0;
    int classes = 0;
    int hidden = 0;
    std::vector<double> w1; // hidden x bands, row-major
    std::vector<double> b1; // hidden
    std::vector<double> w2; // classes x hidden, row-major
    std::vector<double> b2; // classes
    NormBounds norm;

    void forward(const std::vector<double>& x_norm, std::vector<double>& hidden_out,
                 std::vector<double>& out) const;
};

/// Radial-basis-function network: prototype layer fit by online k-means,
/// Gaussian activations, sigmoid output layer trained by the delta rule.
struct RbfModel {
    int bands = 0;
    int classes = 0;
    int k = 0;
    std::vector<double> centers; // k x bands, row-major, in normalized feature space
    std::vector<double> widths;  // k, strictly positive
    std::vector<double> w_out;   // classes x k, row-major
    std::vector<double> b_out;   // classes
    NormBounds norm;

    void activations(const std::vector<double>& x_norm, std::vector<double>& phi) const;
    void forward(const std::vector<double>& x_norm, std::vector<double>& phi,
                 std::vector<double>& out) const;
};

/// Polynomial network: multiplicative expansion of the inputs into all
/// monomials up to the given degree, followed by a single sigmoid layer.
/// Realizes hyperquadric decision surfaces at degree 2.
struct PolyModel {
    int bands = 0;
    int classes = 0;
    int degree = 2;
    std::vector<double> coeffs; // classes x terms, row-major; term 0 is the constant
    NormBounds norm;

    int terms() const;
    void forward(const std::vector<double>& x_norm, std::vector<double>& expanded,
                 std::vector<double>& out) const;
};

/// Fuzzy c-means clustering of a scalar map, with a rank map from clusters
/// to tissue classes (highest centroid = fluid, lowest = background).
struct FcmModel {
    std::vector<double> centroids;
    double fuzzifier = 2.0;
    std::vector<std::uint8_t> cluster_to_class; // by cluster index
    bool replicate_scalar = false;
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct MlpTrainResult {
    MlpModel model;
    double final_mse = 0.0;
    int epochs = 0;
};

/// Online error backpropagation on mean squared error against 0.1/0.9
/// one-hot targets. Stops when the epoch MSE drops to config.eps or at
/// config.max_iters epochs. Deterministic for a fixed seed.
MlpTrainResult train_mlp(const TrainingSet& ts, const TrainConfig& config, int hidden = 60);

/// Gradient of the per-sample loss 1/2 * sum_k (out_k - target_k)^2 with
/// respect to every parameter, laid out as (w1, b1, w2, b2). This is the
/// exact update direction the training loop applies.
std::vector<double> mlp_gradient(const MlpModel& model, const std::vector<double>& x_norm,
                                 const std::vector<double>& target);

struct KmeansConfig {
    double eta0 = 0.1;
    int max_iters = 200;
    std::uint64_t seed = 0;
    double tau = 0.0; // 0 = max_iters / 2
};

struct KmeansResult {
    std::vector<double> centers; // k x dim, row-major
    double quantization_error = 0.0; // mean squared distance to nearest center
    std::vector<double> qe_history;  // batch-evaluated after each epoch
};

/// Sequential (online) k-means with decaying learning rate. Centers that win
/// no sample in an epoch are re-seeded to the sample farthest from its
/// nearest center.
KmeansResult train_kmeans(const std::vector<std::vector<double>>& inputs, int k,
                          const KmeansConfig& config);

struct RbfConfig {
    int k = 18;
    double eta0_hidden = 0.1;
    int iters_hidden = 200;
    double eta0_out = 0.1;
    int iters_out = 200;
    std::uint64_t seed = 0;
};

struct RbfTrainResult {
    RbfModel model;
    double final_mse = 0.0;
    double quantization_error = 0.0;
};

/// Two-stage fit: k-means prototypes on the normalized inputs, widths from
/// the nearest-neighbour distance between centers, then delta-rule training
/// of the sigmoid output layer on the Gaussian activations for the full
/// iteration budget.
RbfTrainResult train_rbf(const TrainingSet& ts, const RbfConfig& config);

struct PolyTrainResult {
    PolyModel model;
    double final_mse = 0.0;
    int epochs = 0;
};

/// Delta-rule training of the sigmoid output layer on the monomial
/// expansion. Same stopping rule as train_mlp.
PolyTrainResult train_poly(const TrainingSet& ts, const TrainConfig& config, int degree = 2);

/// Gradient of the per-sample loss 1/2 * sum_k (out_k - target_k)^2 with
/// respect to the coefficient matrix, row-major.
std::vector<double> poly_gradient(const PolyModel& model, const std::vector<double>& x_norm,
                                  const std::vector<double>& target);

/// All monomials of the input up to `degree`, ordered by total degree; within
/// a degree the pure powers come first, then the mixed products
/// lexicographically. Degree 2 over (x1,x2,x3) yields
/// (1, x1, x2, x3, x1^2, x2^2, x3^2, x1*x2, x1*x3, x2*x3).
std::vector<double> poly_expand(const std::vector<double>& x, int degree = 2);

/// Number of monomials of n variables up to `degree`: C(n + degree, degree).
int poly_term_count(int n, int degree);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Per voxel: normalize, forward pass, argmax over the outputs. Ties break
/// toward the lowest class index. Output labels are 1-based class indices.
LabelVolume classify(const MlpModel& model, const MultispectralVolume& msvolume);
LabelVolume classify(const RbfModel& model, const MultispectralVolume& msvolume);
LabelVolume classify(const PolyModel& model, const MultispectralVolume& msvolume);

/// Hard labels from memberships to the stored centroids, mapped through
/// cluster_to_class.
LabelVolume classify(const FcmModel& model, const Volume& scalar_map);

// ---------------------------------------------------------------------------
// Fuzzy c-means
// ---------------------------------------------------------------------------

struct FcmConfig {
    int c = 3;
    double fuzzifier = 2.0;
    int max_iters = 200;
    double tol = 1e-9; // stop when the largest centroid shift falls below this
    std::uint64_t seed = 0;
    // Accepted for config compatibility; the standard membership/centroid
    // update rules have no learning rate, so this field is unused.
    double eta0 = 0.1;
    // Cluster the scalar replicated across three coordinates instead of the
    // raw scalar. Identical partitions; only the reported objective scales.
    bool replicate_scalar = false;
};

struct FcmResult {
    FcmModel model;
    LabelVolume labels;               // hard class labels via cluster_to_class
    std::vector<int> cluster_index;   // winning cluster per voxel, 0-based
    std::vector<double> objective_history; // J_m after each iteration
    int iters = 0;
};

/// Standard fuzzy c-means on the values of a scalar volume (typically an
/// apparent-diffusion map). Alternates membership and centroid updates until
/// the centroids stop moving or max_iters is reached; the objective J_m is
/// non-increasing across iterations. Clusters are then ranked by centroid
/// value to produce class labels: highest = fluid, middle = matter,
/// lowest = background.
FcmResult fcm_cluster(const Volume& scalar_map, const FcmConfig& config = {});

/// Overrides the rank-based cluster assignment: each cluster takes the
/// majority class among reference-labelled voxels it captured.
std::vector<std::uint8_t> assign_clusters_by_majority(
    const std::vector<int>& cluster_index, int c,
    const std::map<std::uint8_t, LabelVolume>& reference_masks);

/// Membership vector of one value against the centroids; sums to 1. The same
/// update rule fcm_cluster iterates.
std::vector<double> fcm_memberships(double value, const std::vector<double>& centroids,
                                    double fuzzifier);

} // namespace dwiseg
