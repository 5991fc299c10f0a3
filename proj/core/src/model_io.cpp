#include "dwiseg/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace dwiseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json bounds_to_json(const NormBounds& b) {
    return json{{"lo", b.lo}, {"hi", b.hi}};
}

NormBounds bounds_from_json(const json& j) {
    NormBounds b;
    b.lo = j.at("lo").get<std::vector<double>>();
    b.hi = j.at("hi").get<std::vector<double>>();
    return b;
}

json provenance_to_json(const TrainProvenance& p) {
    return json{{"seed", p.seed},           {"eta0", p.eta0},   {"eps", p.eps},
                {"max_iters", p.max_iters}, {"epochs", p.epochs}, {"final_mse", p.final_mse}};
}

} // namespace

std::string model_kind(const AnyModel& model) {
    switch (model.index()) {
    case 0: return "mlp";
    case 1: return "rbf";
    case 2: return "poly";
    default: return "fcm";
    }
}

void save_model(const fs::path& path, const AnyModel& model, const TrainProvenance& provenance) {
    json j;
    j["format"] = "dwiseg-model";
    j["version"] = kFormatVersion;
    j["kind"] = model_kind(model);
    j["training"] = provenance_to_json(provenance);

    if (const auto* m = std::get_if<MlpModel>(&model)) {
        j["bands"] = m->bands;
        j["classes"] = m->classes;
        j["hidden"] = m->hidden;
        j["w1"] = m->w1;
        j["b1"] = m->b1;
        j["w2"] = m->w2;
        j["b2"] = m->b2;
        j["normalization"] = bounds_to_json(m->norm);
    } else if (const auto* m = std::get_if<RbfModel>(&model)) {
        j["bands"] = m->bands;
        j["classes"] = m->classes;
        j["k"] = m->k;
        j["centers"] = m->centers;
        j["widths"] = m->widths;
        j["w_out"] = m->w_out;
        j["b_out"] = m->b_out;
        j["normalization"] = bounds_to_json(m->norm);
    } else if (const auto* m = std::get_if<PolyModel>(&model)) {
        j["bands"] = m->bands;
        j["classes"] = m->classes;
        j["degree"] = m->degree;
        j["coeffs"] = m->coeffs;
        j["normalization"] = bounds_to_json(m->norm);
    } else if (const auto* m = std::get_if<FcmModel>(&model)) {
        j["centroids"] = m->centroids;
        j["fuzzifier"] = m->fuzzifier;
        j["cluster_to_class"] = m->cluster_to_class;
        j["replicate_scalar"] = m->replicate_scalar;
    }

    if (!path.parent_path().empty())
        fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << j.dump(2) << "\n";
    if (!f)
        throw IoError("short write to " + path.string());
}

AnyModel load_model(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw IoError("invalid model file " + path.string() + ": " + e.what());
    }

    try {
        if (j.at("format").get<std::string>() != "dwiseg-model")
            throw IoError(path.string() + " is not a model file");
        if (j.at("version").get<int>() > kFormatVersion)
            throw IoError("model file version is newer than this build supports");
        const std::string kind = j.at("kind").get<std::string>();

        if (kind == "mlp") {
            MlpModel m;
            m.bands = j.at("bands").get<int>();
            m.classes = j.at("classes").get<int>();
            m.hidden = j.at("hidden").get<int>();
            m.w1 = j.at("w1").get<std::vector<double>>();
            m.b1 = j.at("b1").get<std::vector<double>>();
            m.w2 = j.at("w2").get<std::vector<double>>();
            m.b2 = j.at("b2").get<std::vector<double>>();
            m.norm = bounds_from_json(j.at("normalization"));
            return m;
        }
        if (kind == "rbf") {
            RbfModel m;
            m.bands = j.at("bands").get<int>();
            m.classes = j.at("classes").get<int>();
            m.k = j.at("k").get<int>();
            m.centers = j.at("centers").get<std::vector<double>>();
            m.widths = j.at("widths").get<std::vector<double>>();
            m.w_out = j.at("w_out").get<std::vector<double>>();
            m.b_out = j.at("b_out").get<std::vector<double>>();
            m.norm = bounds_from_json(j.at("normalization"));
            return m;
        }
        if (kind == "poly") {
            PolyModel m;
            m.bands = j.at("bands").get<int>();
            m.classes = j.at("classes").get<int>();
            m.degree = j.at("degree").get<int>();
            m.coeffs = j.at("coeffs").get<std::vector<double>>();
            m.norm = bounds_from_json(j.at("normalization"));
            return m;
        }
        if (kind == "fcm") {
            FcmModel m;
            m.centroids = j.at("centroids").get<std::vector<double>>();
            m.fuzzifier = j.at("fuzzifier").get<double>();
            m.cluster_to_class = j.at("cluster_to_class").get<std::vector<std::uint8_t>>();
            m.replicate_scalar = j.value("replicate_scalar", false);
            return m;
        }
        throw IoError("unknown model kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw IoError("malformed model file " + path.string() + ": " + e.what());
    }
}

} // namespace dwiseg
