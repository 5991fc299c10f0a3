#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "dwiseg/classifiers.hpp"

namespace dwiseg {

using AnyModel = std::variant<MlpModel, RbfModel, PolyModel, FcmModel>;

/// Provenance recorded next to the weights so a run can be reproduced from
/// the model file alone.
struct TrainProvenance {
    std::uint64_t seed = 0;
    double eta0 = 0.0;
    double eps = 0.0;
    int max_iters = 0;
    double final_mse = 0.0;
    int epochs = 0;
};

/// Serializes a model to a versioned JSON document with full-precision
/// weights. The file round-trips bit-exactly through load_model.
void save_model(const std::filesystem::path& path, const AnyModel& model,
                const TrainProvenance& provenance = {});

AnyModel load_model(const std::filesystem::path& path);

/// "mlp", "rbf", "poly" or "fcm".
std::string model_kind(const AnyModel& model);

} // namespace dwiseg
