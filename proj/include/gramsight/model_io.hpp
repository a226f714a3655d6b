#pragma once

#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gramsight/forest.hpp"
#include "gramsight/io_util.hpp"
#include "gramsight/logreg.hpp"
#include "gramsight/mlp.hpp"
#include "gramsight/training_config.hpp"

namespace gramsight {

using ModelArtifact = std::variant<LogRegOVR, Forest, Mlp>;

inline ModelKind kind_of(const ModelArtifact& model) {
  if (std::holds_alternative<LogRegOVR>(model)) return ModelKind::logreg;
  if (std::holds_alternative<Forest>(model)) return ModelKind::forest;
  return ModelKind::mlp;
}

inline Prediction predict(const ModelArtifact& model, const std::vector<uint32_t>& row) {
  return std::visit([&](const auto& m) { return predict(m, row); }, model);
}

namespace detail {

inline std::string render_config(const TrainingConfig& c) {
  std::ostringstream out;
  out << "config seed=" << c.seed << " C=" << fmt_g17(c.C)
      << " tolerance=" << fmt_g17(c.tolerance) << " max_iterations=" << c.max_iterations
      << " n_trees=" << c.n_trees << " min_leaf_fraction=" << fmt_g17(c.min_leaf_fraction)
      << " hidden=" << c.hidden << " learning_rate=" << fmt_g17(c.learning_rate)
      << " max_epochs=" << c.max_epochs << " batch_size=" << c.batch_size
      << " init_range=" << fmt_g17(c.init_range) << " k_folds=" << c.k_folds;
  return out.str();
}

inline TrainingConfig parse_config_line(const std::string& line) {
  TrainingConfig c;
  std::istringstream in(line);
  std::string word;
  in >> word;  // "config"
  while (in >> word) {
    size_t eq = word.find('=');
    if (eq == std::string::npos) throw ParseError("model config: bad token " + word);
    std::string key = word.substr(0, eq);
    std::string value = word.substr(eq + 1);
    if (key == "seed") c.seed = std::stoull(value);
    else if (key == "C") c.C = parse_double(value);
    else if (key == "tolerance") c.tolerance = parse_double(value);
    else if (key == "max_iterations") c.max_iterations = std::stoul(value);
    else if (key == "n_trees") c.n_trees = std::stoul(value);
    else if (key == "min_leaf_fraction") c.min_leaf_fraction = parse_double(value);
    else if (key == "hidden") c.hidden = std::stoul(value);
    else if (key == "learning_rate") c.learning_rate = parse_double(value);
    else if (key == "max_epochs") c.max_epochs = std::stoul(value);
    else if (key == "batch_size") c.batch_size = std::stoul(value);
    else if (key == "init_range") c.init_range = parse_double(value);
    else if (key == "k_folds") c.k_folds = std::stoul(value);
    else throw ParseError("model config: unknown key " + key);
  }
  return c;
}

}  // namespace detail

// Versioned text container; loading a rendered model and rendering it again
// reproduces the bytes exactly.
inline std::string render_model(const ModelArtifact& model) {
  std::ostringstream out;
  out << "# gramsight-model v1\n";
  out << "kind " << to_string(kind_of(model)) << "\n";

  std::visit(
      [&](const auto& m) {
        out << "n_features " << m.n_features << "\n";
        out << "classes";
        for (int label : m.class_labels) out << " " << label;
        out << "\n" << detail::render_config(m.config) << "\n";
      },
      model);

  if (const auto* lr = std::get_if<LogRegOVR>(&model)) {
    for (size_t c = 0; c < lr->class_labels.size(); ++c) {
      out << "submodel " << lr->class_labels[c] << "\n";
      out << "intercept " << fmt_g17(lr->intercepts[c]) << "\n";
      out << "weights";
      for (double w : lr->weights[c]) out << " " << fmt_g17(w);
      out << "\n";
    }
  } else if (const auto* rf = std::get_if<Forest>(&model)) {
    for (size_t t = 0; t < rf->trees.size(); ++t) {
      const auto& tree = rf->trees[t];
      out << "tree " << t << " nodes " << tree.nodes.size() << "\n";
      for (const auto& node : tree.nodes) {
        out << "node " << node.feature << " " << node.left << " " << node.right << " "
            << node.count;
        for (double d : node.dist) out << " " << fmt_g17(d);
        out << "\n";
      }
    }
  } else if (const auto* nn = std::get_if<Mlp>(&model)) {
    out << "hidden " << nn->hidden << "\n";
    for (size_t f = 0; f < nn->n_features; ++f) {
      out << "w1";
      for (size_t h = 0; h < nn->hidden; ++h) out << " " << fmt_g17(nn->w1_at(f, h));
      out << "\n";
    }
    for (size_t h = 0; h < nn->hidden; ++h) {
      out << "w2";
      for (size_t k = 0; k < nn->n_outputs(); ++k) out << " " << fmt_g17(nn->w2_at(h, k));
      out << "\n";
    }
  }
  return out.str();
}

inline ModelArtifact parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;

  auto next_line = [&](const char* what) -> std::string {
    if (!std::getline(in, line)) throw ParseError(std::string("model: missing ") + what);
    return line;
  };

  if (next_line("header") != "# gramsight-model v1") throw ParseError("model: bad header");
  std::istringstream kind_line(next_line("kind"));
  std::string word, kind_str;
  kind_line >> word >> kind_str;
  if (word != "kind") throw ParseError("model: expected kind line");
  ModelKind kind = model_kind_from_string(kind_str);

  std::istringstream nf_line(next_line("n_features"));
  size_t n_features = 0;
  nf_line >> word >> n_features;
  if (word != "n_features") throw ParseError("model: expected n_features line");

  std::istringstream cls_line(next_line("classes"));
  cls_line >> word;
  if (word != "classes") throw ParseError("model: expected classes line");
  std::vector<int> classes;
  for (int label; cls_line >> label;) classes.push_back(label);

  TrainingConfig config = detail::parse_config_line(next_line("config"));

  if (kind == ModelKind::logreg) {
    LogRegOVR model;
    model.n_features = n_features;
    model.class_labels = classes;
    model.config = config;
    for (size_t c = 0; c < classes.size(); ++c) {
      std::istringstream sub(next_line("submodel"));
      int label;
      sub >> word >> label;
      if (word != "submodel" || label != classes[c]) throw ParseError("model: bad submodel line");
      std::istringstream ic(next_line("intercept"));
      std::string v;
      ic >> word >> v;
      model.intercepts.push_back(parse_double(v));
      std::istringstream ws(next_line("weights"));
      ws >> word;
      std::vector<double> weights;
      weights.reserve(n_features);
      for (std::string tok; ws >> tok;) weights.push_back(parse_double(tok));
      if (weights.size() != n_features) throw ParseError("model: weight count mismatch");
      model.weights.push_back(std::move(weights));
    }
    return model;
  }

  if (kind == ModelKind::forest) {
    Forest model;
    model.n_features = n_features;
    model.class_labels = classes;
    model.config = config;
    while (std::getline(in, line)) {
      std::istringstream th(line);
      size_t idx = 0, count = 0;
      th >> word >> idx;
      if (word != "tree") throw ParseError("model: expected tree line");
      th >> word >> count;
      DecisionTree tree;
      for (size_t i = 0; i < count; ++i) {
        std::istringstream nd(next_line("node"));
        nd >> word;
        if (word != "node") throw ParseError("model: expected node line");
        TreeNode node;
        nd >> node.feature >> node.left >> node.right >> node.count;
        for (std::string tok; nd >> tok;) node.dist.push_back(parse_double(tok));
        tree.nodes.push_back(std::move(node));
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  }

  Mlp model;
  model.n_features = n_features;
  model.class_labels = classes;
  model.config = config;
  std::istringstream hl(next_line("hidden"));
  hl >> word >> model.hidden;
  if (word != "hidden") throw ParseError("model: expected hidden line");
  model.w1.reserve(n_features * model.hidden);
  for (size_t f = 0; f < n_features; ++f) {
    std::istringstream row(next_line("w1"));
    row >> word;
    if (word != "w1") throw ParseError("model: expected w1 line");
    for (std::string tok; row >> tok;) model.w1.push_back(parse_double(tok));
  }
  if (model.w1.size() != n_features * model.hidden) throw ParseError("model: w1 size mismatch");
  for (size_t h = 0; h < model.hidden; ++h) {
    std::istringstream row(next_line("w2"));
    row >> word;
    if (word != "w2") throw ParseError("model: expected w2 line");
    for (std::string tok; row >> tok;) model.w2.push_back(parse_double(tok));
  }
  if (model.w2.size() != model.hidden * classes.size()) throw ParseError("model: w2 size mismatch");
  return model;
}

}  // namespace gramsight
