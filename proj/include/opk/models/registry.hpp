#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "opk/core/rng.hpp"
#include "opk/models/bidisc.hpp"
#include "opk/models/moment.hpp"

namespace opk {

//! Raised for malformed or contradictory run configurations; the command-line
//! tool maps it to the configuration-error exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! A kernel tabulated on a fixed finite grid: the kernel evaluates only at the
//! listed points, so only the grid-supported diagnostics (symmetry, positivity,
//! factorization, amplitudes) apply to it.
struct TabulatedGrid {
  ChartKernel kernel;
  std::vector<Point> points;
};

//! Builds a grid-only kernel from a structured description:
//!   { "fiber_dim": f, "points": [[x, ...], ...],
//!     "values": [ [ block, ... ], ... ] }
//! where values[i][j] is the f × f matrix K(p_i, p_j) given row-major with
//! [re, im] entries. Malformed descriptions raise ConfigError.
inline TabulatedGrid load_tabulated_grid(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("points") || !spec.contains("values")) {
    throw ConfigError("config: a tabulated kernel needs 'points' and 'values'");
  }
  TabulatedGrid grid;
  int fiber = 1;
  try {
    if (spec.contains("fiber_dim")) fiber = spec.at("fiber_dim").get<int>();
    if (fiber < 1) throw ConfigError("config: tabulated fiber_dim must be positive");
    for (const auto& row : spec.at("points")) {
      const auto coords = row.get<std::vector<double>>();
      if (coords.empty()) throw ConfigError("config: tabulated grid points need coordinates");
      Point p(static_cast<int>(coords.size()));
      for (std::size_t i = 0; i < coords.size(); ++i) p[static_cast<int>(i)] = coords[i];
      if (!grid.points.empty() && p.size() != grid.points.front().size()) {
        throw ConfigError("config: tabulated grid points disagree on dimension");
      }
      grid.points.push_back(p);
    }
    if (grid.points.empty()) throw ConfigError("config: tabulated grid is empty");
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      for (std::size_t j = i + 1; j < grid.points.size(); ++j) {
        if ((grid.points[i] - grid.points[j]).cwiseAbs().maxCoeff() <= 1e-12) {
          throw ConfigError("config: tabulated grid points must be distinct");
        }
      }
    }
    const std::size_t count = grid.points.size();
    std::vector<CMat> blocks;
    blocks.reserve(count * count);
    const auto& values = spec.at("values");
    if (values.size() != count) {
      throw ConfigError("config: tabulated values must form a square grid of blocks");
    }
    for (const auto& row : values) {
      if (row.size() != count) {
        throw ConfigError("config: tabulated values must form a square grid of blocks");
      }
      for (const auto& block : row) {
        if (block.size() != static_cast<std::size_t>(fiber)) {
          throw ConfigError("config: a tabulated block does not match fiber_dim");
        }
        CMat b(fiber, fiber);
        for (int r = 0; r < fiber; ++r) {
          const auto entries = block.at(r);
          if (entries.size() != static_cast<std::size_t>(fiber)) {
            throw ConfigError("config: a tabulated block does not match fiber_dim");
          }
          for (int c = 0; c < fiber; ++c) {
            const auto pair = entries.at(c).get<std::vector<double>>();
            if (pair.size() != 2) {
              throw ConfigError("config: tabulated entries are [re, im] pairs");
            }
            b(r, c) = Complex(pair[0], pair[1]);
          }
        }
        blocks.push_back(std::move(b));
      }
    }

    const int dim = static_cast<int>(grid.points.front().size());
    DomainBox box;
    box.lo = grid.points.front();
    box.hi = grid.points.front();
    for (const Point& p : grid.points) {
      box.lo = box.lo.cwiseMin(p);
      box.hi = box.hi.cwiseMax(p);
    }
    grid.kernel.fiber_dim = fiber;
    grid.kernel.chart_dim = dim;
    grid.kernel.holomorphic = false;
    grid.kernel.grid_only = true;
    grid.kernel.domain = box;
    const std::vector<Point> pts = grid.points;
    grid.kernel.eval = [pts, blocks, count](const Point& m, const Point& n) -> CMat {
      const auto locate = [&pts](const Point& q) -> std::size_t {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if ((q - pts[i]).cwiseAbs().maxCoeff() <= 1e-12) return i;
        }
        throw std::domain_error("tabulated kernel: point is not on the grid");
      };
      return blocks[locate(m) * count + locate(n)];
    };
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed tabulated kernel (") + e.what() + ")");
  }
  return grid;
}

//! Parsed run configuration. Every field has a model-specific default, so an
//! empty JSON object is a valid configuration.
struct ModelConfig {
  std::string model = "bidisc";  // "bidisc" | "moment:gaussian" | "moment:discrete" | "tabulated"
  int sample_count = 10;
  double sample_half_width = 0.0;  // 0 = model default
  std::vector<double> times;       // empty = model default
  std::optional<Vec> atoms;
  std::optional<Vec> weights;
  std::vector<Point> frame_points;   // empty = model default
  nlohmann::json tabulated;          // grid description for the tabulated model
};

//! Parses a configuration object. Unknown model names and malformed fields
//! throw std::runtime_error (mapped to the configuration-error exit code).
inline ModelConfig parse_model_config(const nlohmann::json& j) {
  ModelConfig cfg;
  try {
    if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      if (s.contains("count")) cfg.sample_count = s.at("count").get<int>();
      if (s.contains("half_width")) cfg.sample_half_width = s.at("half_width").get<double>();
    }
    if (j.contains("times")) cfg.times = j.at("times").get<std::vector<double>>();
    if (j.contains("measure")) {
      if (cfg.model != "moment" && cfg.model.rfind("moment:", 0) != 0) {
        throw ConfigError("config: a measure block applies only to moment models");
      }
      const auto& m = j.at("measure");
      const std::string kind = m.contains("kind") ? m.at("kind").get<std::string>() : "discrete";
      if (kind == "gaussian") {
        cfg.model = "moment:gaussian";
      } else if (kind == "discrete") {
        cfg.model = "moment:discrete";
      } else {
        throw ConfigError("config: unknown measure kind '" + kind + "'");
      }
      if (m.contains("atoms")) {
        const auto atoms = m.at("atoms").get<std::vector<double>>();
        Vec v(static_cast<int>(atoms.size()));
        for (std::size_t i = 0; i < atoms.size(); ++i) v[static_cast<int>(i)] = atoms[i];
        cfg.atoms = v;
      }
      if (m.contains("weights")) {
        const auto weights = m.at("weights").get<std::vector<double>>();
        Vec v(static_cast<int>(weights.size()));
        for (std::size_t i = 0; i < weights.size(); ++i) v[static_cast<int>(i)] = weights[i];
        cfg.weights = v;
      }
    }
    if (j.contains("frame_points")) {
      for (const auto& row : j.at("frame_points")) {
        const auto coords = row.get<std::vector<double>>();
        Point p(static_cast<int>(coords.size()));
        for (std::size_t i = 0; i < coords.size(); ++i) p[static_cast<int>(i)] = coords[i];
        cfg.frame_points.push_back(p);
      }
    }
    if (cfg.model == "tabulated") {
      if (!j.contains("tabulated") || !j.at("tabulated").is_object()) {
        throw ConfigError(
            "config: the tabulated model needs a 'tabulated' block describing the grid");
      }
      const nlohmann::json& src = j.at("tabulated");
      const bool inline_kernel = src.contains("kernel");
      const bool file_kernel = src.contains("file");
      if (inline_kernel == file_kernel) {
        throw ConfigError(
            "config: the tabulated model needs exactly one of 'kernel' (inline grid) or "
            "'file' (path to a grid description)");
      }
      if (inline_kernel) {
        cfg.tabulated = src.at("kernel");
      } else {
        const std::string path = src.at("file").get<std::string>();
        std::ifstream in(path);
        if (!in) {
          throw ConfigError("config: cannot read tabulated kernel file '" + path + "'");
        }
        cfg.tabulated = nlohmann::json::parse(in);
      }
      load_tabulated_grid(cfg.tabulated);  // validate eagerly, at parse time
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.model == "moment") cfg.model = "moment:discrete";
  if (cfg.model != "bidisc" && cfg.model != "moment:gaussian" && cfg.model != "moment:discrete" &&
      cfg.model != "tabulated") {
    throw ConfigError("config: unknown model '" + cfg.model + "'");
  }
  if (cfg.sample_count < 1 || cfg.sample_count > 1000) {
    throw ConfigError("config: samples.count out of range");
  }
  return cfg;
}

//! A fully materialized model: kernel, structure group, named flows and
//! pairs, deterministic sample points, and (for moment models) the measure.
struct ModelData {
  ModelConfig cfg;
  ChartKernel kernel;
  Representation rep;
  std::vector<std::pair<std::string, FlowSpec>> flows;
  std::optional<HamiltonianPair> translation_pair;  // moment models
  std::optional<MomentMeasure> measure;             // moment models
  std::vector<Point> samples;
  std::vector<Point> frame_points;
  std::vector<double> times;
  bool is_bidisc = false;
};

inline ModelData make_model(const ModelConfig& cfg, std::uint64_t seed) {
  ModelData data;
  data.cfg = cfg;
  Rng rng(seed);
  if (cfg.model == "bidisc") {
    data.is_bidisc = true;
    data.kernel = bidisc_kernel();
    data.rep = bidisc_representation();
    data.flows = {{"rot1", bidisc_flow("rot1")},
                  {"rot2", bidisc_flow("rot2")},
                  {"sigma", bidisc_flow("sigma")}};
    const double hw = cfg.sample_half_width > 0.0 ? cfg.sample_half_width : 0.55;
    data.samples = bidisc_sample_points(rng, cfg.sample_count, hw);
    data.frame_points = cfg.frame_points.empty() ? bidisc_frame_points() : cfg.frame_points;
    data.times = cfg.times.empty() ? std::vector<double>{0.1, 0.5} : cfg.times;
  } else if (cfg.model == "tabulated") {
    TabulatedGrid grid = load_tabulated_grid(cfg.tabulated);
    data.kernel = grid.kernel;
    data.rep.kind = GroupKind::U1;
    data.rep.fiber_dim = grid.kernel.fiber_dim;
    data.samples = grid.points;  // a fixed grid ignores the sampling options
  } else {
    MomentMeasure measure;
    if (cfg.model == "moment:gaussian") {
      measure = gaussian_measure();
    } else if (cfg.atoms.has_value() || cfg.weights.has_value()) {
      if (!cfg.atoms.has_value() || !cfg.weights.has_value()) {
        throw ConfigError("config: discrete measure needs both atoms and weights");
      }
      try {
        measure = discrete_measure(*cfg.atoms, *cfg.weights);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else {
      measure = two_atom_measure();
    }
    TranslationModel model = translation_model(measure);
    data.kernel = model.kernel;
    data.rep = model.rep;
    data.flows = {{"translation", model.flow}};
    data.translation_pair = model.pair;
    data.measure = measure;
    const double hw = cfg.sample_half_width > 0.0 ? cfg.sample_half_width : 1.0;
    data.samples.reserve(static_cast<std::size_t>(cfg.sample_count));
    for (int i = 0; i < cfg.sample_count; ++i) {
      Point p(2);
      p[0] = rng.uniform(-hw, hw);
      p[1] = rng.uniform(-hw, hw);
      data.samples.push_back(p);
    }
    if (!cfg.frame_points.empty()) {
      data.frame_points = cfg.frame_points;
    } else if (cfg.model == "moment:gaussian") {
      Point a(2), b(2), c(2);
      a << 0.0, 0.0;
      b << 0.5, 0.0;
      c << -0.3, 0.2;
      data.frame_points = {a, b, c};
    } else {
      Point a(2), b(2);
      a << 0.0, 0.0;
      b << M_PI / 4.0, 0.0;
      data.frame_points = {a, b};
    }
    data.times = cfg.times.empty() ? std::vector<double>{0.1, 0.5, 1.0} : cfg.times;
  }
  return data;
}

inline ModelData make_model(const nlohmann::json& config, std::uint64_t seed) {
  return make_model(parse_model_config(config), seed);
}

}  // namespace opk
