// dwiseg: synthesize diffusion-weighted brain volumes, map apparent
// diffusion, train per-voxel tissue classifiers and evaluate them.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwiseg/adc.hpp"
#include "dwiseg/classifiers.hpp"
#include "dwiseg/error.hpp"
#include "dwiseg/features.hpp"
#include "dwiseg/metrics.hpp"
#include "dwiseg/model_io.hpp"
#include "dwiseg/phantom.hpp"
#include "dwiseg/render.hpp"
#include "dwiseg/rng.hpp"
#include "dwiseg/signal.hpp"
#include "dwiseg/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dwiseg;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

Grid3 parse_grid(const std::string& s) {
    Grid3 g;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(s);
    if (!(in >> g.nx >> sep1 >> g.ny >> sep2 >> g.nz) || sep1 != 'x' || sep2 != 'x')
        throw InvalidParameter("grid must look like 128x128x20, got '" + s + "'");
    g.validate();
    return g;
}

std::uint64_t stage_seed(std::uint64_t run_seed, std::uint64_t stage) {
    return mix64(run_seed + stage * 0x9e3779b97f4a7c15ull);
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (!path.parent_path().empty())
        fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f)
        throw IoError("short write to " + path.string());
}

json read_json_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    try {
        json j;
        f >> j;
        return j;
    } catch (const json::exception& e) {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

// Tissue physics travels next to a phantom's label container so synthesis
// can be re-run from the files alone.
void write_physics(const fs::path& dir, const Phantom& phantom) {
    json classes = json::object();
    for (const auto& [label, p] : phantom.classes)
        classes[std::to_string(label)] = {{"rho", p.rho}, {"t2", p.t2}, {"d", p.d}};
    json j = {{"k", phantom.k}, {"classes", classes}};
    write_text_file(dir / "physics.json", j.dump(2) + "\n");
}

Phantom read_phantom_dir(const fs::path& dir) {
    Phantom phantom;
    phantom.labels = read_labels(dir);
    json j = read_json_file(dir / "physics.json");
    try {
        phantom.k = j.at("k").get<double>();
        for (const auto& [key, value] : j.at("classes").items()) {
            TissueClassParams p;
            p.label = static_cast<std::uint8_t>(std::stoi(key));
            p.rho = value.at("rho").get<double>();
            p.t2 = value.at("t2").get<double>();
            p.d = value.at("d").get<double>();
            phantom.classes[p.label] = p;
        }
    } catch (const json::exception& e) {
        throw IoError("malformed physics.json: " + std::string(e.what()));
    }
    return phantom;
}

double mean_over_head(const Volume& band, const LabelVolume& labels) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t v = 0; v < band.data.size(); ++v) {
        if (labels.data[v] != label_of(Tissue::Background)) {
            sum += band.data[v];
            ++n;
        }
    }
    if (n == 0)
        throw InvalidInput("phantom has no in-head voxels");
    return sum / static_cast<double>(n);
}

std::map<std::uint8_t, std::string> roi_class_names(std::uint8_t label) {
    return {{label, "roi"}};
}

// ---------------------------------------------------------------------------
// Run settings: defaults, JSON config and flag overrides
// ---------------------------------------------------------------------------

// The 13th slice of a 20-slice stack shows the ventricle horns; the same
// relative height is used for other slice counts.
int default_slice(int nz) {
    return std::clamp(static_cast<int>(std::floor(0.625 * nz)), 0, nz - 1);
}

struct RunSettings {
    Grid3 grid{128, 128, 20};
    BrainGeometry geometry{};
    AcquisitionParams acquisition{};
    std::string noise_kind = "rician";
    std::optional<double> snr = 20.0; // sigma derived from the b=0 head mean
    std::optional<double> sigma;      // direct sigma wins over snr
    AdcConfig adc{};
    std::string adc_mode = "faithful";
    RoiSpec roi{};
    bool roi_slices_set = false;
    TrainConfig mlp{0.2, 0.05, 1000};
    int mlp_hidden = 60;
    RbfConfig rbf{};
    TrainConfig poly{0.1, 0.05, 200};
    int poly_degree = 2;
    FcmConfig fcm{};
    std::vector<int> render_slices{12};
    bool render_slices_set = false;
    bool kappa_literal = false;

    RunSettings() { acquisition.b_values = {0.0, 500.0, 1000.0}; }

    /// Re-derives slice defaults after the grid is known.
    void finalize_slices() {
        if (!roi_slices_set)
            roi.slices = {default_slice(grid.nz)};
        if (!render_slices_set)
            render_slices = {default_slice(grid.nz)};
    }
};

void apply_tissue(const json& j, TissueClassParams& p) {
    p.rho = j.value("rho", p.rho);
    p.t2 = j.value("t2", p.t2);
    p.d = j.value("d", p.d);
}

RunSettings settings_from_config(const json& j) {
    RunSettings s;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        s.grid = {g.value("nx", s.grid.nx), g.value("ny", s.grid.ny), g.value("nz", s.grid.nz)};
    }
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        BrainGeometry& geo = s.geometry;
        geo.head_rx = g.value("head_rx", geo.head_rx);
        geo.head_ry = g.value("head_ry", geo.head_ry);
        geo.head_rz = g.value("head_rz", geo.head_rz);
        geo.vent_dx = g.value("vent_dx", geo.vent_dx);
        geo.vent_dy = g.value("vent_dy", geo.vent_dy);
        geo.vent_rx = g.value("vent_rx", geo.vent_rx);
        geo.vent_ry = g.value("vent_ry", geo.vent_ry);
        geo.vent_rz = g.value("vent_rz", geo.vent_rz);
        geo.sulci_inner = g.value("sulci_inner", geo.sulci_inner);
        geo.sulci_outer = g.value("sulci_outer", geo.sulci_outer);
        geo.sulci_count = g.value("sulci_count", geo.sulci_count);
        geo.sulci_fill = g.value("sulci_fill", geo.sulci_fill);
        geo.k = g.value("k", geo.k);
        if (g.contains("csf"))
            apply_tissue(g.at("csf"), geo.csf);
        if (g.contains("matter"))
            apply_tissue(g.at("matter"), geo.matter);
        if (g.contains("background"))
            apply_tissue(g.at("background"), geo.background);
    }
    if (j.contains("acquisition")) {
        const json& a = j.at("acquisition");
        s.acquisition.gamma = a.value("gamma", s.acquisition.gamma);
        s.acquisition.te = a.value("te", s.acquisition.te);
        if (a.contains("b_values"))
            s.acquisition.b_values = a.at("b_values").get<std::vector<double>>();
        if (a.contains("gradients"))
            s.acquisition.gradients = a.at("gradients").get<std::vector<double>>();
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        s.noise_kind = n.value("kind", s.noise_kind);
        if (n.contains("sigma")) {
            s.sigma = n.at("sigma").get<double>();
            s.snr.reset();
        } else if (n.contains("snr")) {
            s.snr = n.at("snr").get<double>();
        }
    }
    if (j.contains("adc")) {
        const json& a = j.at("adc");
        s.adc.c = a.value("c", s.adc.c);
        s.adc.floor = a.value("floor", s.adc.floor);
        s.adc_mode = a.value("mode", s.adc_mode);
    }
    if (j.contains("roi")) {
        const json& r = j.at("roi");
        if (r.contains("slices")) {
            s.roi.slices = r.at("slices").get<std::vector<int>>();
            s.roi_slices_set = true;
        }
        s.roi.erode = r.value("erode", s.roi.erode);
        auto cap = [&](const char* key, Tissue t) {
            if (r.contains(key))
                s.roi.max_per_class[label_of(t)] = r.at(key).get<int>();
        };
        cap("max_csf", Tissue::Csf);
        cap("max_matter", Tissue::Matter);
        cap("max_background", Tissue::Background);
    }
    if (j.contains("mlp")) {
        const json& m = j.at("mlp");
        s.mlp.eta0 = m.value("eta0", s.mlp.eta0);
        s.mlp.eps = m.value("eps", s.mlp.eps);
        s.mlp.max_iters = m.value("max_iters", s.mlp.max_iters);
        s.mlp_hidden = m.value("hidden", s.mlp_hidden);
    }
    if (j.contains("rbf")) {
        const json& r = j.at("rbf");
        s.rbf.k = r.value("k", s.rbf.k);
        s.rbf.eta0_hidden = r.value("eta0_hidden", s.rbf.eta0_hidden);
        s.rbf.iters_hidden = r.value("iters_hidden", s.rbf.iters_hidden);
        s.rbf.eta0_out = r.value("eta0_out", s.rbf.eta0_out);
        s.rbf.iters_out = r.value("iters_out", s.rbf.iters_out);
    }
    if (j.contains("poly")) {
        const json& p = j.at("poly");
        s.poly.eta0 = p.value("eta0", s.poly.eta0);
        s.poly.eps = p.value("eps", s.poly.eps);
        s.poly.max_iters = p.value("max_iters", s.poly.max_iters);
        s.poly_degree = p.value("degree", s.poly_degree);
    }
    if (j.contains("fcm")) {
        const json& f = j.at("fcm");
        s.fcm.c = f.value("c", s.fcm.c);
        s.fcm.fuzzifier = f.value("fuzzifier", s.fcm.fuzzifier);
        s.fcm.max_iters = f.value("max_iters", s.fcm.max_iters);
        s.fcm.tol = f.value("tol", s.fcm.tol);
        s.fcm.eta0 = f.value("eta0", s.fcm.eta0);
        s.fcm.replicate_scalar = f.value("replicate_scalar", s.fcm.replicate_scalar);
    }
    if (j.contains("render_slices")) {
        s.render_slices = j.at("render_slices").get<std::vector<int>>();
        s.render_slices_set = true;
    }
    s.kappa_literal = j.value("kappa_literal", s.kappa_literal);
    return s;
}

json settings_to_json(const RunSettings& s) {
    json geo = {
        {"head_rx", s.geometry.head_rx},     {"head_ry", s.geometry.head_ry},
        {"head_rz", s.geometry.head_rz},     {"vent_dx", s.geometry.vent_dx},
        {"vent_dy", s.geometry.vent_dy},     {"vent_rx", s.geometry.vent_rx},
        {"vent_ry", s.geometry.vent_ry},     {"vent_rz", s.geometry.vent_rz},
        {"sulci_inner", s.geometry.sulci_inner}, {"sulci_outer", s.geometry.sulci_outer},
        {"sulci_count", s.geometry.sulci_count}, {"sulci_fill", s.geometry.sulci_fill},
        {"k", s.geometry.k},
        {"csf", {{"rho", s.geometry.csf.rho}, {"t2", s.geometry.csf.t2}, {"d", s.geometry.csf.d}}},
        {"matter",
         {{"rho", s.geometry.matter.rho}, {"t2", s.geometry.matter.t2}, {"d", s.geometry.matter.d}}},
        {"background",
         {{"rho", s.geometry.background.rho},
          {"t2", s.geometry.background.t2},
          {"d", s.geometry.background.d}}},
    };
    json noise;
    noise["kind"] = s.noise_kind;
    if (s.sigma)
        noise["sigma"] = *s.sigma;
    else if (s.snr)
        noise["snr"] = *s.snr;
    return json{
        {"grid", {{"nx", s.grid.nx}, {"ny", s.grid.ny}, {"nz", s.grid.nz}}},
        {"geometry", geo},
        {"acquisition",
         {{"gamma", s.acquisition.gamma},
          {"te", s.acquisition.te},
          {"b_values", s.acquisition.b_values}}},
        {"noise", noise},
        {"adc", {{"c", s.adc.c}, {"floor", s.adc.floor}, {"mode", s.adc_mode}}},
        {"roi",
         {{"slices", s.roi.slices},
          {"erode", s.roi.erode},
          {"max_csf", s.roi.max_per_class.at(label_of(Tissue::Csf))},
          {"max_matter", s.roi.max_per_class.at(label_of(Tissue::Matter))},
          {"max_background", s.roi.max_per_class.at(label_of(Tissue::Background))}}},
        {"mlp",
         {{"eta0", s.mlp.eta0},
          {"eps", s.mlp.eps},
          {"max_iters", s.mlp.max_iters},
          {"hidden", s.mlp_hidden}}},
        {"rbf",
         {{"k", s.rbf.k},
          {"eta0_hidden", s.rbf.eta0_hidden},
          {"iters_hidden", s.rbf.iters_hidden},
          {"eta0_out", s.rbf.eta0_out},
          {"iters_out", s.rbf.iters_out}}},
        {"poly",
         {{"eta0", s.poly.eta0},
          {"eps", s.poly.eps},
          {"max_iters", s.poly.max_iters},
          {"degree", s.poly_degree}}},
        {"fcm",
         {{"c", s.fcm.c},
          {"fuzzifier", s.fcm.fuzzifier},
          {"max_iters", s.fcm.max_iters},
          {"tol", s.fcm.tol},
          {"eta0", s.fcm.eta0},
          {"replicate_scalar", s.fcm.replicate_scalar}}},
        {"render_slices", s.render_slices},
        {"kappa_literal", s.kappa_literal},
    };
}

ArtifactMode parse_mode(const std::string& mode) {
    if (mode == "faithful")
        return ArtifactMode::Faithful;
    if (mode == "masked")
        return ArtifactMode::Masked;
    throw InvalidParameter("artifact mode must be faithful or masked, got '" + mode + "'");
}

NoiseModel make_noise(const RunSettings& s, const Phantom& phantom, std::uint64_t seed) {
    NoiseModel noise;
    noise.seed = seed;
    if (s.noise_kind == "none") {
        noise.kind = NoiseKind::None;
        return noise;
    }
    if (s.noise_kind == "gaussian")
        noise.kind = NoiseKind::Gaussian;
    else if (s.noise_kind == "rician")
        noise.kind = NoiseKind::Rician;
    else
        throw InvalidParameter("noise kind must be none, gaussian or rician, got '" +
                               s.noise_kind + "'");
    if (s.sigma) {
        noise.sigma = *s.sigma;
        return noise;
    }
    if (!s.snr || !(*s.snr > 0.0))
        throw InvalidParameter("noise needs either sigma or a positive snr");
    // SNR convention: noiseless b=0 signal averaged over the head, over sigma.
    MultispectralVolume clean = synthesize_dwi(phantom, s.acquisition, NoiseModel{});
    noise.sigma = mean_over_head(clean.bands[0], phantom.labels) / *s.snr;
    return noise;
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

json report_entry(const ConfusionMatrix& cm, const VolumeReport& vols, bool literal_too) {
    AgreementReport agreement = agreement_report(cm);
    json confusion = json::array();
    for (int i = 0; i < cm.m; ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < cm.m; ++j2)
            row.push_back(cm.at(i, j2));
        confusion.push_back(row);
    }
    json e = {
        {"phi", agreement.phi},
        {"phi_percent", 100.0 * agreement.phi},
        {"rho_z", agreement.rho_z},
        {"kappa", agreement.kappa},
        {"confusion", confusion},
        {"v_percent", vols.v_percent},
        {"counts", vols.counts},
    };
    if (vols.fluid_matter_ratio)
        e["fluid_matter_ratio"] = *vols.fluid_matter_ratio;
    else
        e["fluid_matter_ratio"] = nullptr;
    if (literal_too)
        e["kappa_literal"] = kappa(cm, KappaForm::LiteralRowColOverSquares);
    return e;
}

std::string format_table(const std::vector<std::string>& names, const json& entries) {
    std::ostringstream out;
    auto row = [&](const std::string& label, auto value_of) {
        out << std::left << std::setw(10) << label;
        for (const std::string& n : names)
            out << std::right << std::setw(12) << value_of(entries.at(n));
        out << "\n";
    };
    out << std::left << std::setw(10) << "";
    for (const std::string& n : names)
        out << std::right << std::setw(12) << n;
    out << "\n";
    auto fmt = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(4) << v;
        return s.str();
    };
    row("phi(%)", [&](const json& e) { return fmt(e.at("phi_percent").get<double>()); });
    row("kappa", [&](const json& e) { return fmt(e.at("kappa").get<double>()); });
    for (int c = 0; c < 3; ++c)
        row("V" + std::to_string(c + 1) + "(%)", [&](const json& e) {
            return fmt(e.at("v_percent").at(c).get<double>());
        });
    row("V1/V2", [&](const json& e) {
        return e.at("fluid_matter_ratio").is_null()
                   ? std::string("undefined")
                   : fmt(e.at("fluid_matter_ratio").get<double>());
    });
    return out.str();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct PhantomArgs {
    std::string out;
    std::string grid; // empty = config value or built-in default
    std::string config;
    std::string roi_out;
};

void cmd_phantom(const PhantomArgs& a) {
    RunSettings s;
    if (!a.config.empty())
        s = settings_from_config(read_json_file(a.config));
    if (!a.grid.empty())
        s.grid = parse_grid(a.grid);
    Grid3 grid = s.grid;
    s.finalize_slices();

    Phantom phantom = make_brain_phantom(grid, s.geometry);
    write_labels(a.out, phantom.labels);
    write_physics(a.out, phantom);

    if (!a.roi_out.empty()) {
        auto masks = make_roi_masks(phantom.labels, s.roi);
        write_labels(fs::path(a.roi_out) / "csf", masks.at(label_of(Tissue::Csf)),
                     roi_class_names(1));
        write_labels(fs::path(a.roi_out) / "matter", masks.at(label_of(Tissue::Matter)),
                     roi_class_names(1));
        write_labels(fs::path(a.roi_out) / "background",
                     masks.at(label_of(Tissue::Background)), roi_class_names(1));
    }
    VolumeReport vols = volume_report(phantom.labels);
    std::cout << "phantom " << grid.to_string() << ": csf " << vols.v_percent[0] << "%, matter "
              << vols.v_percent[1] << "%, background " << vols.v_percent[2] << "%\n";
}

struct SynthArgs {
    std::string phantom_dir;
    std::string out;
    std::string config;
    std::string noise; // empty = config value or built-in default
    double snr = -1.0;
    double sigma = -1.0;
    std::vector<double> b_values;
    double te = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void cmd_synth(const SynthArgs& a) {
    RunSettings s;
    if (!a.config.empty())
        s = settings_from_config(read_json_file(a.config));
    if (!a.noise.empty())
        s.noise_kind = a.noise;
    if (a.sigma >= 0.0) {
        s.sigma = a.sigma;
        s.snr.reset();
    } else if (a.snr > 0.0) {
        s.snr = a.snr;
        s.sigma.reset();
    }
    if (!a.b_values.empty())
        s.acquisition.b_values = a.b_values;
    if (a.te > 0.0)
        s.acquisition.te = a.te;
    if (s.noise_kind != "none" && !a.seed_set)
        throw InvalidParameter("noisy synthesis requires --seed");

    Phantom phantom = read_phantom_dir(a.phantom_dir);
    NoiseModel noise = make_noise(s, phantom, a.seed);
    MultispectralVolume ms = synthesize_dwi(phantom, s.acquisition, noise);
    write_signal(a.out, ms);
    std::cout << "synthesized " << ms.band_count() << " bands at "
              << ms.grid().to_string() << " (sigma " << noise.sigma << ")\n";
}

struct AdcArgs {
    std::string in;
    std::string out;
    double c = 1.0;
    double floor = 1e-12;
    std::string mode = "faithful";
};

void cmd_adc(const AdcArgs& a) {
    MultispectralVolume ms = read_signal(a.in);
    if (ms.b_values.empty())
        throw InvalidInput("signal container carries no b-values");
    AdcConfig cfg{a.c, a.floor};
    Volume adc = compute_adc_map(ms, ms.b_values, cfg, parse_mode(a.mode));
    write_scalar(a.out, adc, "adc");
    std::cout << "adc map written to " << a.out << "\n";
}

struct TrainArgs {
    std::string model;
    std::string in;
    std::string out;
    std::string roi_csf, roi_matter, roi_background;
    std::vector<int> slices{12};
    std::uint64_t seed = 0;
    bool seed_set = false;
    // supervised nets
    double eta0 = -1.0;
    double eps = -1.0;
    int max_iters = -1;
    int hidden = 60;
    int degree = 2;
    // rbf
    int k = 18;
    double eta0_hidden = 0.1;
    int iters_hidden = 200;
    double eta0_out = 0.1;
    int iters_out = 200;
    // fcm
    int clusters = 3;
    double fuzzifier = 2.0;
    int fcm_iters = 200;
    double tol = 1e-9;
    bool replicate = false;
};

TrainingSet roi_training_set(const std::string& in, const TrainArgs& a) {
    MultispectralVolume ms = read_signal(in);
    std::map<std::uint8_t, LabelVolume> masks;
    if (a.roi_csf.empty() || a.roi_matter.empty() || a.roi_background.empty())
        throw InvalidParameter("supervised training needs --roi-csf, --roi-matter and "
                               "--roi-background");
    masks[label_of(Tissue::Csf)] = read_labels(a.roi_csf);
    masks[label_of(Tissue::Matter)] = read_labels(a.roi_matter);
    masks[label_of(Tissue::Background)] = read_labels(a.roi_background);
    return build_training_set(ms, masks, a.slices);
}

void cmd_train(const TrainArgs& a) {
    if (!a.seed_set)
        throw InvalidParameter("training requires --seed");

    if (a.model == "mlp" || a.model == "poly") {
        TrainingSet ts = roi_training_set(a.in, a);
        TrainConfig cfg = a.model == "mlp" ? TrainConfig{0.2, 0.05, 1000} : TrainConfig{0.1, 0.05, 200};
        if (a.eta0 > 0.0)
            cfg.eta0 = a.eta0;
        if (a.eps > 0.0)
            cfg.eps = a.eps;
        if (a.max_iters > 0)
            cfg.max_iters = a.max_iters;
        cfg.seed = a.seed;
        TrainProvenance prov{a.seed, cfg.eta0, cfg.eps, cfg.max_iters, 0.0, 0};
        if (a.model == "mlp") {
            MlpTrainResult r = train_mlp(ts, cfg, a.hidden);
            prov.final_mse = r.final_mse;
            prov.epochs = r.epochs;
            save_model(a.out, r.model, prov);
            std::cout << "mlp trained: mse " << r.final_mse << " after " << r.epochs
                      << " epochs\n";
        } else {
            PolyTrainResult r = train_poly(ts, cfg, a.degree);
            prov.final_mse = r.final_mse;
            prov.epochs = r.epochs;
            save_model(a.out, r.model, prov);
            std::cout << "poly trained: mse " << r.final_mse << " after " << r.epochs
                      << " epochs\n";
        }
        return;
    }
    if (a.model == "rbf") {
        TrainingSet ts = roi_training_set(a.in, a);
        RbfConfig cfg;
        cfg.k = a.k;
        cfg.eta0_hidden = a.eta0_hidden;
        cfg.iters_hidden = a.iters_hidden;
        cfg.eta0_out = a.eta0_out;
        cfg.iters_out = a.iters_out;
        cfg.seed = a.seed;
        RbfTrainResult r = train_rbf(ts, cfg);
        TrainProvenance prov{a.seed, cfg.eta0_out, 0.0, cfg.iters_out, r.final_mse, cfg.iters_out};
        save_model(a.out, r.model, prov);
        std::cout << "rbf trained: mse " << r.final_mse << ", quantization error "
                  << r.quantization_error << "\n";
        return;
    }
    if (a.model == "fcm") {
        Volume adc = read_scalar(a.in, "adc");
        FcmConfig cfg;
        cfg.c = a.clusters;
        cfg.fuzzifier = a.fuzzifier;
        cfg.max_iters = a.fcm_iters;
        cfg.tol = a.tol;
        cfg.seed = a.seed;
        cfg.replicate_scalar = a.replicate;
        FcmResult r = fcm_cluster(adc, cfg);
        TrainProvenance prov{a.seed, 0.0, 0.0, cfg.max_iters,
                             r.objective_history.empty() ? 0.0 : r.objective_history.back(),
                             r.iters};
        save_model(a.out, r.model, prov);
        std::cout << "fcm converged after " << r.iters << " iterations\n";
        return;
    }
    throw InvalidParameter("model must be mlp, rbf, poly or fcm, got '" + a.model + "'");
}

struct ClassifyArgs {
    std::string model;
    std::string in;
    std::string out;
};

void cmd_classify(const ClassifyArgs& a) {
    AnyModel model = load_model(a.model);
    LabelVolume labels;
    if (std::holds_alternative<FcmModel>(model)) {
        Volume adc = read_scalar(a.in, "adc");
        labels = classify(std::get<FcmModel>(model), adc);
    } else {
        MultispectralVolume ms = read_signal(a.in);
        if (const auto* m = std::get_if<MlpModel>(&model))
            labels = classify(*m, ms);
        else if (const auto* m = std::get_if<RbfModel>(&model))
            labels = classify(*m, ms);
        else
            labels = classify(std::get<PolyModel>(model), ms);
    }
    write_labels(a.out, labels);
    std::cout << "classified with " << model_kind(model) << " -> " << a.out << "\n";
}

struct EvaluateArgs {
    std::string truth;
    std::string pred;
    std::string out;
    std::string text;
    std::string mask;
    std::vector<int> slices;
    bool kappa_literal = false;
};

void cmd_evaluate(const EvaluateArgs& a) {
    LabelVolume truth = read_labels(a.truth);
    LabelVolume pred = read_labels(a.pred);
    ConfusionMatrix cm = a.slices.empty()
                             ? confusion_matrix(truth, pred, kNumClasses)
                             : confusion_matrix(truth, pred, kNumClasses, a.slices);
    LabelVolume mask;
    const LabelVolume* mask_ptr = nullptr;
    if (!a.mask.empty()) {
        mask = read_labels(a.mask);
        mask_ptr = &mask;
    }
    VolumeReport vols = volume_report(pred, mask_ptr);
    json entry = report_entry(cm, vols, a.kappa_literal);
    json report = {{"prediction", entry}};
    if (!a.out.empty())
        write_text_file(a.out, report.dump(2) + "\n");
    json named;
    named["prediction"] = entry;
    std::string table = format_table({"prediction"}, named);
    if (!a.text.empty())
        write_text_file(a.text, table);
    std::cout << table;
}

struct RenderArgs {
    std::string in;
    std::string out;
    std::string out_dir;
    int slice = -1;
    int band = 0;
};

void cmd_render(const RenderArgs& a) {
    ContainerMeta meta = read_meta(a.in);
    LabelVolume labels;
    Volume scalar;
    if (meta.kind == "labels") {
        labels = read_labels(a.in);
    } else if (meta.kind == "signal") {
        MultispectralVolume ms = read_signal(a.in);
        if (a.band < 0 || a.band >= ms.band_count())
            throw InvalidInput("band out of range");
        scalar = std::move(ms.bands[a.band]);
    } else {
        scalar = read_scalar(a.in, meta.kind);
    }
    auto render_one = [&](int slice) {
        return meta.kind == "labels" ? render_labels(labels, slice)
                                     : render_scalar(scalar, slice);
    };
    if (!a.out_dir.empty()) {
        fs::create_directories(a.out_dir);
        for (int z = 0; z < meta.grid.nz; ++z)
            write_pgm(fs::path(a.out_dir) / ("slice_" + std::to_string(z) + ".pgm"),
                      meta.grid.nx, meta.grid.ny, render_one(z));
        std::cout << meta.grid.nz << " slices rendered to " << a.out_dir << "\n";
        return;
    }
    if (a.slice < 0)
        throw InvalidParameter("render needs --slice or --out-dir");
    if (a.out.empty())
        throw InvalidParameter("render needs --out for single-slice output");
    write_pgm(a.out, meta.grid.nx, meta.grid.ny, render_one(a.slice));
    std::cout << "slice " << a.slice << " rendered to " << a.out << "\n";
}

struct PipelineArgs {
    std::string out;
    std::string config;
    std::string grid;
    std::uint64_t seed = 0;
    double snr = -1.0;
    std::string noise;
};

void cmd_pipeline(const PipelineArgs& a) {
    RunSettings s;
    if (!a.config.empty())
        s = settings_from_config(read_json_file(a.config));
    if (!a.grid.empty())
        s.grid = parse_grid(a.grid);
    if (a.snr > 0.0) {
        s.snr = a.snr;
        s.sigma.reset();
    }
    if (!a.noise.empty())
        s.noise_kind = a.noise;
    s.finalize_slices();

    const fs::path out(a.out);
    fs::create_directories(out);
    std::ostringstream log;

    // Stage 1: phantom and training regions.
    Phantom phantom = make_brain_phantom(s.grid, s.geometry);
    write_labels(out / "phantom", phantom.labels);
    write_physics(out / "phantom", phantom);
    auto masks = make_roi_masks(phantom.labels, s.roi);
    write_labels(out / "rois" / "csf", masks.at(label_of(Tissue::Csf)), roi_class_names(1));
    write_labels(out / "rois" / "matter", masks.at(label_of(Tissue::Matter)),
                 roi_class_names(1));
    write_labels(out / "rois" / "background", masks.at(label_of(Tissue::Background)),
                 roi_class_names(1));
    log << "phantom: " << s.grid.to_string() << "\n";

    // Stage 2: acquisition.
    NoiseModel noise = make_noise(s, phantom, stage_seed(a.seed, 1));
    MultispectralVolume dwi = synthesize_dwi(phantom, s.acquisition, noise);
    write_signal(out / "dwi", dwi);
    log << "synth: sigma " << noise.sigma << "\n";

    // Stage 3: diffusion map for the clustering branch.
    Volume adc = compute_adc_map(dwi, s.acquisition.b_values, s.adc, parse_mode(s.adc_mode));
    write_scalar(out / "adc", adc, "adc");

    // Stage 4: training set from the ROIs.
    TrainingSet ts = build_training_set(dwi, masks, s.roi.slices);
    log << "training set: " << ts.samples.size() << " samples\n";

    // Stage 5: reference labelling by the polynomial network.
    TrainConfig poly_cfg = s.poly;
    poly_cfg.seed = stage_seed(a.seed, 2);
    PolyTrainResult poly = train_poly(ts, poly_cfg, s.poly_degree);
    save_model(out / "models" / "poly.json", poly.model,
               {poly_cfg.seed, poly_cfg.eta0, poly_cfg.eps, poly_cfg.max_iters, poly.final_mse,
                poly.epochs});
    LabelVolume truth = classify(poly.model, dwi);
    write_labels(out / "labels" / "truth", truth);
    log << "poly: mse " << poly.final_mse << " epochs " << poly.epochs << "\n";

    // Stage 6: the two multispectral classifiers.
    TrainConfig mlp_cfg = s.mlp;
    mlp_cfg.seed = stage_seed(a.seed, 3);
    MlpTrainResult mlp = train_mlp(ts, mlp_cfg, s.mlp_hidden);
    save_model(out / "models" / "mlp.json", mlp.model,
               {mlp_cfg.seed, mlp_cfg.eta0, mlp_cfg.eps, mlp_cfg.max_iters, mlp.final_mse,
                mlp.epochs});
    LabelVolume mlp_labels = classify(mlp.model, dwi);
    write_labels(out / "labels" / "mlp", mlp_labels);
    log << "mlp: mse " << mlp.final_mse << " epochs " << mlp.epochs << "\n";

    RbfConfig rbf_cfg = s.rbf;
    rbf_cfg.seed = stage_seed(a.seed, 4);
    RbfTrainResult rbf = train_rbf(ts, rbf_cfg);
    save_model(out / "models" / "rbf.json", rbf.model,
               {rbf_cfg.seed, rbf_cfg.eta0_out, 0.0, rbf_cfg.iters_out, rbf.final_mse,
                rbf_cfg.iters_out});
    LabelVolume rbf_labels = classify(rbf.model, dwi);
    write_labels(out / "labels" / "rbf", rbf_labels);
    log << "rbf: mse " << rbf.final_mse << " qe " << rbf.quantization_error << "\n";

    // Stage 7: unsupervised clustering of the diffusion map.
    FcmConfig fcm_cfg = s.fcm;
    fcm_cfg.seed = stage_seed(a.seed, 5);
    FcmResult fcm = fcm_cluster(adc, fcm_cfg);
    save_model(out / "models" / "fcm.json", fcm.model,
               {fcm_cfg.seed, 0.0, 0.0, fcm_cfg.max_iters,
                fcm.objective_history.empty() ? 0.0 : fcm.objective_history.back(), fcm.iters});
    write_labels(out / "labels" / "fcm", fcm.labels);
    log << "fcm: iters " << fcm.iters << "\n";

    // Stage 8: evaluation against the reference labelling.
    json entries;
    std::vector<std::pair<std::string, const LabelVolume*>> predictions = {
        {"mlp", &mlp_labels}, {"rbf", &rbf_labels}, {"adc_cm", &fcm.labels}};
    for (const auto& [name, labels] : predictions) {
        ConfusionMatrix cm = confusion_matrix(truth, *labels, kNumClasses);
        entries[name] = report_entry(cm, volume_report(*labels), s.kappa_literal);
    }
    json report = {
        {"seed", a.seed},
        {"config", settings_to_json(s)},
        {"sigma", noise.sigma},
        {"truth_volumes", report_entry(confusion_matrix(truth, truth, kNumClasses),
                                       volume_report(truth), false)},
        {"phantom_volumes", report_entry(confusion_matrix(phantom.labels, phantom.labels,
                                                          kNumClasses),
                                         volume_report(phantom.labels), false)},
        {"classifiers", entries},
    };
    write_text_file(out / "report.json", report.dump(2) + "\n");

    json table_entries = entries;
    table_entries["truth_poly"] = report["truth_volumes"];
    std::string table =
        format_table({"mlp", "rbf", "adc_cm", "truth_poly"}, table_entries);
    write_text_file(out / "report.txt", table);

    // Stage 9: slice renders of every labelling plus the inputs.
    fs::create_directories(out / "renders");
    for (int z : s.render_slices) {
        auto save = [&](const std::string& name, const LabelVolume& labels) {
            write_pgm(out / "renders" / (name + "_slice" + std::to_string(z) + ".pgm"),
                      s.grid.nx, s.grid.ny, render_labels(labels, z));
        };
        save("truth", truth);
        save("mlp", mlp_labels);
        save("rbf", rbf_labels);
        save("adc_cm", fcm.labels);
        save("phantom", phantom.labels);
        write_pgm(out / "renders" / ("b0_slice" + std::to_string(z) + ".pgm"), s.grid.nx,
                  s.grid.ny, render_scalar(dwi.bands[0], z));
        write_pgm(out / "renders" / ("adc_slice" + std::to_string(z) + ".pgm"), s.grid.nx,
                  s.grid.ny, render_scalar(adc, z));
    }

    // Timestamps live only here, keeping the artifact tree byte-reproducible.
    std::ostringstream stamped;
    stamped << log.str();
    write_text_file(out / "run.log", stamped.str());

    std::cout << table;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion-weighted MR synthesis, ADC mapping and tissue classification"};
    app.require_subcommand(1);

    PhantomArgs phantom_args;
    CLI::App* phantom = app.add_subcommand("phantom", "Generate a labelled head phantom");
    phantom->add_option("--out", phantom_args.out, "Output label container")->required();
    phantom->add_option("--grid", phantom_args.grid, "Grid as NXxNYxNZ");
    phantom->add_option("--config", phantom_args.config, "Run-settings JSON");
    phantom->add_option("--roi-out", phantom_args.roi_out, "Also write per-class ROI masks here");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Synthesize diffusion-weighted volumes");
    synth->add_option("--phantom", synth_args.phantom_dir, "Phantom container")->required();
    synth->add_option("--out", synth_args.out, "Output signal container")->required();
    synth->add_option("--config", synth_args.config, "Run-settings JSON");
    synth->add_option("--noise", synth_args.noise, "none, gaussian or rician");
    synth->add_option("--snr", synth_args.snr, "Signal-to-noise ratio (b=0 head mean / sigma)");
    synth->add_option("--sigma", synth_args.sigma, "Noise level, overrides --snr");
    synth->add_option("--b-values", synth_args.b_values, "Diffusion weightings, s/mm^2");
    synth->add_option("--te", synth_args.te, "Echo time, s");
    synth->add_option("--seed", synth_args.seed, "Noise seed")
        ->each([&](const std::string&) { synth_args.seed_set = true; });

    AdcArgs adc_args;
    CLI::App* adc = app.add_subcommand("adc", "Compute the apparent-diffusion map");
    adc->add_option("--in", adc_args.in, "Signal container")->required();
    adc->add_option("--out", adc_args.out, "Output scalar container")->required();
    adc->add_option("--c", adc_args.c, "Proportionality constant");
    adc->add_option("--floor", adc_args.floor, "No-signal floor");
    adc->add_option("--mode", adc_args.mode, "faithful or masked");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a classifier");
    train->add_option("--model", train_args.model, "mlp, rbf, poly or fcm")->required();
    train->add_option("--in", train_args.in, "Signal container (fcm: adc container)")->required();
    train->add_option("--out", train_args.out, "Output model JSON")->required();
    train->add_option("--roi-csf", train_args.roi_csf, "Fluid ROI mask container");
    train->add_option("--roi-matter", train_args.roi_matter, "Matter ROI mask container");
    train->add_option("--roi-background", train_args.roi_background, "Background ROI mask");
    train->add_option("--slices", train_args.slices, "Training slice indices, 0-based");
    train->add_option("--seed", train_args.seed, "Training seed")
        ->each([&](const std::string&) { train_args.seed_set = true; });
    train->add_option("--eta0", train_args.eta0, "Initial learning rate");
    train->add_option("--eps", train_args.eps, "Target epoch MSE");
    train->add_option("--max-iters", train_args.max_iters, "Epoch cap");
    train->add_option("--hidden", train_args.hidden, "MLP hidden units");
    train->add_option("--degree", train_args.degree, "Polynomial degree");
    train->add_option("--k", train_args.k, "RBF prototype count");
    train->add_option("--eta0-hidden", train_args.eta0_hidden, "RBF k-means learning rate");
    train->add_option("--iters-hidden", train_args.iters_hidden, "RBF k-means epochs");
    train->add_option("--eta0-out", train_args.eta0_out, "RBF output-layer learning rate");
    train->add_option("--iters-out", train_args.iters_out, "RBF output-layer epochs");
    train->add_option("--clusters", train_args.clusters, "FCM cluster count");
    train->add_option("--fuzzifier", train_args.fuzzifier, "FCM fuzzifier");
    train->add_option("--fcm-iters", train_args.fcm_iters, "FCM iteration cap");
    train->add_option("--tol", train_args.tol, "FCM centroid tolerance");
    train->add_flag("--replicate", train_args.replicate,
                    "Cluster the scalar replicated across three coordinates");

    ClassifyArgs classify_args;
    CLI::App* classify_cmd = app.add_subcommand("classify", "Label a volume with a model");
    classify_cmd->add_option("--model", classify_args.model, "Model JSON")->required();
    classify_cmd->add_option("--in", classify_args.in, "Input container")->required();
    classify_cmd->add_option("--out", classify_args.out, "Output label container")->required();

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Compare a labelling against truth");
    evaluate->add_option("--truth", eval_args.truth, "Truth label container")->required();
    evaluate->add_option("--pred", eval_args.pred, "Predicted label container")->required();
    evaluate->add_option("--out", eval_args.out, "Report JSON path");
    evaluate->add_option("--text", eval_args.text, "Aligned text table path");
    evaluate->add_option("--mask", eval_args.mask, "Volume-percentage domain mask");
    evaluate->add_option("--slices", eval_args.slices, "Restrict to these slices");
    evaluate->add_flag("--kappa-literal", eval_args.kappa_literal,
                       "Also report kappa under the literal squared-cell denominator");

    RenderArgs render_args;
    CLI::App* render = app.add_subcommand("render", "Export slices as PGM images");
    render->add_option("--in", render_args.in, "Any volume container")->required();
    render->add_option("--slice", render_args.slice, "Slice index, 0-based");
    render->add_option("--band", render_args.band, "Band for signal containers");
    render->add_option("--out", render_args.out, "Output PGM for --slice");
    render->add_option("--out-dir", render_args.out_dir, "Render every slice here");

    PipelineArgs pipeline_args;
    CLI::App* pipeline = app.add_subcommand("pipeline", "Run the full experiment");
    pipeline->add_option("--out", pipeline_args.out, "Output directory")->required();
    pipeline->add_option("--seed", pipeline_args.seed, "Run seed (required for reproducibility)")
        ->required();
    pipeline->add_option("--config", pipeline_args.config, "Run-settings JSON");
    pipeline->add_option("--grid", pipeline_args.grid, "Grid as NXxNYxNZ");
    pipeline->add_option("--snr", pipeline_args.snr, "Signal-to-noise ratio");
    pipeline->add_option("--noise", pipeline_args.noise, "none, gaussian or rician");

    try {
        app.parse(argc, argv);
        if (*phantom)
            cmd_phantom(phantom_args);
        else if (*synth)
            cmd_synth(synth_args);
        else if (*adc)
            cmd_adc(adc_args);
        else if (*train)
            cmd_train(train_args);
        else if (*classify_cmd)
            cmd_classify(classify_args);
        else if (*evaluate)
            cmd_evaluate(eval_args);
        else if (*render)
            cmd_render(render_args);
        else if (*pipeline)
            cmd_pipeline(pipeline_args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const dwiseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 70;
    }
    return 0;
}
