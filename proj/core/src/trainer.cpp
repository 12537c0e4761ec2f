#include "polar/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "polar/eval.hpp"
#include "polar/prng.hpp"

namespace polar {

namespace {

using json = nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view to_string(TrainMode m) {
  return m == TrainMode::independent ? "independent" : "mtl";
}

std::optional<TrainMode> train_mode_from_string(std::string_view name) {
  if (name == "independent") return TrainMode::independent;
  if (name == "mtl") return TrainMode::mtl;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(errc::bad_config, "learning rate must be positive");
  if (epochs < 1) throw Error(errc::bad_config, "need at least one epoch");
  if (batch_size < 1) throw Error(errc::bad_config, "batch size must be positive");
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) {
    throw Error(errc::bad_config, "warmup ratio must lie in [0,1)");
  }
  if (patience < 0) throw Error(errc::bad_config, "patience must be >= 0");
  if (loss.gamma < 0.0) throw Error(errc::bad_config, "focal gamma must be >= 0");
  for (const auto& [task, w] : task_weights) {
    if (!(w >= 0.0)) throw Error(errc::bad_config, "task weights must be >= 0");
  }
}

json TrainConfig::to_json() const {
  json j{{"learning_rate", learning_rate},
         {"epochs", epochs},
         {"batch_size", batch_size},
         {"warmup_ratio", warmup_ratio},
         {"patience", patience},
         {"seed", seed},
         {"mode", std::string(to_string(mode))},
         {"loss", std::string(to_string(loss.kind))},
         {"gamma", loss.gamma}};
  if (loss.weights) {
    j["pos_weights"] = loss.weights->w;
  }
  if (!task_weights.empty()) {
    json tw = json::object();
    for (const auto& [task, w] : task_weights) {
      tw[std::string(to_string(task))] = w;
    }
    j["task_weights"] = tw;
  }
  return j;
}

double lr_multiplier(std::int64_t step, std::int64_t total_steps, double warmup_ratio) {
  if (step < 0 || step > total_steps || total_steps <= 0) {
    throw Error(errc::bad_config, "need 0 <= step <= total_steps");
  }
  const auto warmup = static_cast<std::int64_t>(
      std::ceil(warmup_ratio * static_cast<double>(total_steps)));
  if (step < warmup) {
    return static_cast<double>(step) / static_cast<double>(warmup);
  }
  if (total_steps == warmup) {
    return step == total_steps ? 0.0 : 1.0;
  }
  return static_cast<double>(total_steps - step) / static_cast<double>(total_steps - warmup);
}

// ---------------------------------------------------------------------------
// LinearBRModel
// ---------------------------------------------------------------------------

LinearBRModel::LinearBRModel(Subtask st, FeatureSpace fs)
    : subtask_(st), feature_space_(fs) {
  fs.validate();
  const std::size_t n_labels = labels_of(st).size();
  weights_ = MatrixD(n_labels, fs.dim);
  bias_.assign(n_labels, 0.0);
}

std::vector<double> LinearBRModel::logits(const SparseVec& x) const {
  std::vector<double> z(bias_);
  for (std::size_t l = 0; l < z.size(); ++l) {
    const auto row = weights_.row(l);
    double dot = 0.0;
    for (const auto& [idx, val] : x.items) {
      dot += row[idx] * val;
    }
    z[l] += dot;
  }
  return z;
}

json LinearBRModel::to_json() const {
  json rows = json::array();
  for (std::size_t l = 0; l < weights_.rows; ++l) {
    json row = json::array();
    const auto w = weights_.row(l);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) {
        row.push_back(json::array({i, w[i]}));
      }
    }
    rows.push_back(std::move(row));
  }
  return json{{"format", "polar-linear-br"},
              {"version", 1},
              {"subtask", std::string(to_string(subtask_))},
              {"feature_space", feature_space_},
              {"bias", bias_},
              {"weights", {{"dim", feature_space_.dim}, {"rows", std::move(rows)}}},
              {"config_fingerprint", config_fingerprint_}};
}

LinearBRModel LinearBRModel::from_json(const json& j) {
  if (j.value("format", "") != "polar-linear-br") {
    throw Error(errc::bad_config, "not a linear model file");
  }
  auto st = subtask_from_string(j.at("subtask").get<std::string>());
  if (!st) {
    throw Error(errc::bad_config, "model names unknown subtask");
  }
  LinearBRModel model(*st, j.at("feature_space").get<FeatureSpace>());
  const auto& bias = j.at("bias");
  if (bias.size() != model.n_labels()) {
    throw Error(errc::shape_mismatch, "bias length does not match the label count");
  }
  model.bias_ = bias.get<std::vector<double>>();
  const auto& rows = j.at("weights").at("rows");
  if (rows.size() != model.n_labels()) {
    throw Error(errc::shape_mismatch, "weight rows do not match the label count");
  }
  for (std::size_t l = 0; l < rows.size(); ++l) {
    for (const auto& pair : rows[l]) {
      const auto idx = pair.at(0).get<std::size_t>();
      if (idx >= model.feature_space_.dim) {
        throw Error(errc::shape_mismatch, "weight index beyond the feature dimension");
      }
      model.weights_.at(l, idx) = pair.at(1).get<double>();
    }
  }
  model.config_fingerprint_ = j.value("config_fingerprint", "");
  return model;
}

void LinearBRModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  out << to_json().dump(2) << '\n';
}

LinearBRModel LinearBRModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_failure, "cannot open " + path.string());
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(errc::io_failure, "unreadable model file " + path.string());
  }
  return from_json(j);
}

ProbMatrix predict_proba(const LinearBRModel& model, std::span<const Post> posts,
                         std::string source_tag) {
  ProbMatrix out;
  out.subtask = model.subtask();
  out.source = std::move(source_tag);
  out.values = MatrixD(posts.size(), model.n_labels());
  out.ids.reserve(posts.size());
  for (std::size_t r = 0; r < posts.size(); ++r) {
    out.ids.push_back(posts[r].id);
    const auto z = model.logits(featurize(posts[r].text, model.feature_space()));
    for (std::size_t l = 0; l < z.size(); ++l) {
      out.values.at(r, l) = sigmoid(z[l]);
    }
  }
  return out;
}

json to_json(const TrainLog& log) {
  json epochs = json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back(json{{"epoch", e.epoch},
                          {"mean_train_loss", e.mean_train_loss},
                          {"val_macro_f1", e.val_macro_f1},
                          {"improved", e.improved}});
  }
  return json{{"epochs", std::move(epochs)},
              {"best_epoch", log.best_epoch},
              {"best_val_macro_f1", log.best_val_macro_f1},
              {"total_steps", log.total_steps},
              {"early_stopped", log.early_stopped}};
}

// ---------------------------------------------------------------------------
// Training engine (shared by independent and mtl modes)
// ---------------------------------------------------------------------------

namespace {

struct Head {
  Subtask task = Subtask::detect;
  double weight = 1.0;
  const LabelMatrix* gold = nullptr;          // training labels
  std::vector<std::int32_t> row_of;           // union index -> gold row, -1 if absent
  LossConfig loss;                            // weights resolved
  // live parameters
  MatrixD w;
  std::vector<double> b;
  // best-epoch snapshot
  MatrixD best_w;
  std::vector<double> best_b;
  // validation
  const Dataset* val = nullptr;
  std::vector<SparseVec> val_features;
};

LossValue eval_loss(const LossConfig& cfg, int y, double z, std::size_t label) {
  switch (cfg.kind) {
    case LossKind::bce: return bce(y, z);
    case LossKind::wbce: return wbce(y, z, cfg.weights->w[label]);
    case LossKind::focal: return focal(y, z, cfg.gamma);
  }
  return {};
}

double validation_macro_f1(const Head& head) {
  const auto& gold = *head.val->gold;
  LabelMatrix pred(gold.subtask(), gold.ids());
  const std::size_t n_labels = gold.cols();
  for (std::size_t r = 0; r < head.val_features.size(); ++r) {
    for (std::size_t l = 0; l < n_labels; ++l) {
      const auto row = head.w.row(l);
      double z = head.b[l];
      for (const auto& [idx, val] : head.val_features[r].items) {
        z += row[idx] * val;
      }
      pred.set(r, l, sigmoid(z) >= 0.5 ? 1 : 0);
    }
  }
  return macro_f1(gold, pred, default_scheme(gold.subtask()));
}

TrainLog run_engine(const std::vector<SparseVec>& features, std::vector<Head>& heads,
                    const TrainConfig& cfg) {
  const std::size_t n = features.size();
  if (n == 0) {
    throw Error(errc::empty_training_set, "no training posts");
  }
  std::size_t with_val = 0;
  for (const auto& head : heads) {
    if (head.val) {
      ++with_val;
    }
  }
  if (with_val == 0) {
    throw Error(errc::bad_config, "no validation data for early stopping");
  }

  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t n_batches = (n + batch - 1) / batch;
  const std::int64_t total_steps =
      static_cast<std::int64_t>(n_batches) * static_cast<std::int64_t>(cfg.epochs);

  TrainLog log;
  log.total_steps = total_steps;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);

  double best = -1.0;
  int streak = 0;
  std::int64_t step = 0;
  // per-member gradient staging so each batch updates from a fixed snapshot
  std::vector<double> grads;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    fisher_yates_shuffle(order, rng);
    double epoch_loss_sum = 0.0;

    for (std::size_t bstart = 0; bstart < n; bstart += batch) {
      const std::size_t bend = std::min(n, bstart + batch);
      const double lr =
          cfg.learning_rate * lr_multiplier(step, total_steps, cfg.warmup_ratio);
      ++step;

      double batch_loss_sum = 0.0;
      for (auto& head : heads) {
        std::vector<std::size_t> members;  // union indices present in this head
        for (std::size_t i = bstart; i < bend; ++i) {
          if (head.row_of[order[i]] >= 0) {
            members.push_back(order[i]);
          }
        }
        if (members.empty()) {
          continue;
        }
        const std::size_t n_labels = head.b.size();
        const double n_elems = static_cast<double>(members.size() * n_labels);
        grads.assign(members.size() * n_labels, 0.0);

        double loss_sum = 0.0;
        for (std::size_t m = 0; m < members.size(); ++m) {
          const SparseVec& x = features[members[m]];
          const auto gold_row = static_cast<std::size_t>(head.row_of[members[m]]);
          for (std::size_t l = 0; l < n_labels; ++l) {
            const auto wrow = head.w.row(l);
            double z = head.b[l];
            for (const auto& [idx, val] : x.items) {
              z += wrow[idx] * val;
            }
            const LossValue lv =
                eval_loss(head.loss, head.gold->at(gold_row, l), z, l);
            loss_sum += lv.loss;
            grads[m * n_labels + l] = head.weight * lv.dloss_dz / n_elems;
          }
        }
        batch_loss_sum += head.weight * loss_sum / n_elems;

        if (lr != 0.0 && head.weight != 0.0) {
          for (std::size_t m = 0; m < members.size(); ++m) {
            const SparseVec& x = features[members[m]];
            for (std::size_t l = 0; l < n_labels; ++l) {
              const double g = grads[m * n_labels + l];
              if (g == 0.0) {
                continue;
              }
              head.b[l] -= lr * g;
              auto wrow = head.w.row(l);
              for (const auto& [idx, val] : x.items) {
                wrow[idx] -= lr * g * val;
              }
            }
          }
        }
      }
      epoch_loss_sum += batch_loss_sum;
    }

    double val_sum = 0.0;
    for (const auto& head : heads) {
      if (head.val) {
        val_sum += validation_macro_f1(head);
      }
    }
    const double val = val_sum / static_cast<double>(with_val);

    EpochLog entry;
    entry.epoch = epoch;
    entry.mean_train_loss = epoch_loss_sum / static_cast<double>(n_batches);
    entry.val_macro_f1 = val;
    entry.improved = log.epochs.empty() ? true : val > best;
    log.epochs.push_back(entry);

    if (entry.improved) {
      best = val;
      log.best_epoch = epoch;
      log.best_val_macro_f1 = val;
      for (auto& head : heads) {
        head.best_w = head.w;
        head.best_b = head.b;
      }
      streak = 0;
    } else {
      ++streak;
      if (streak > cfg.patience) {
        log.early_stopped = true;
        break;
      }
    }
  }
  return log;
}

std::vector<SparseVec> featurize_posts(std::span<const Post> posts, const FeatureSpace& fs) {
  std::vector<SparseVec> features;
  features.reserve(posts.size());
  for (const auto& p : posts) {
    features.push_back(featurize(p.text, fs));
  }
  return features;
}

LossConfig resolve_loss(const LossConfig& loss, const LabelMatrix& gold) {
  LossConfig resolved = loss;
  if (resolved.kind == LossKind::wbce && !resolved.weights) {
    resolved.weights = compute_pos_weights(gold);
  }
  resolved.validate(gold.cols());
  return resolved;
}

std::string fingerprint(const TrainConfig& cfg) {
  return hex64(fnv1a64(cfg.to_json().dump()));
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const FeatureSpace& fs) {
  cfg.validate();
  fs.validate();
  if (cfg.mode != TrainMode::independent) {
    throw Error(errc::bad_config, "use train_mtl for mtl mode");
  }
  if (train_set.subtask != val_set.subtask) {
    throw Error(errc::subtask_mismatch, "train and val subtasks differ");
  }
  if (train_set.posts.empty()) {
    throw Error(errc::empty_training_set, "train split is empty");
  }
  if (!train_set.gold) {
    throw Error(errc::no_gold_labels, "train split has no labels");
  }
  if (!val_set.gold) {
    throw Error(errc::no_gold_labels, "val split has no labels");
  }

  const auto features = featurize_posts(train_set.posts, fs);

  std::vector<Head> heads(1);
  Head& head = heads[0];
  head.task = train_set.subtask;
  head.weight = 1.0;
  head.gold = &*train_set.gold;
  head.row_of.resize(train_set.posts.size());
  std::iota(head.row_of.begin(), head.row_of.end(), 0);
  head.loss = resolve_loss(cfg.loss, *train_set.gold);
  const std::size_t n_labels = labels_of(train_set.subtask).size();
  head.w = MatrixD(n_labels, fs.dim);
  head.b.assign(n_labels, 0.0);
  head.val = &val_set;
  head.val_features = featurize_posts(val_set.posts, fs);

  TrainLog log = run_engine(features, heads, cfg);

  TrainResult result;
  result.model = LinearBRModel(train_set.subtask, fs);
  result.model.weights() = std::move(head.best_w);
  result.model.bias() = std::move(head.best_b);
  result.model.set_config_fingerprint(fingerprint(cfg));
  result.log = std::move(log);
  return result;
}

MtlResult train_mtl(const MtlBundle& bundle, const TrainConfig& cfg, const FeatureSpace& fs) {
  cfg.validate();
  fs.validate();
  if (bundle.train.empty()) {
    throw Error(errc::empty_training_set, "mtl bundle has no tasks");
  }
  if (cfg.loss.weights) {
    throw Error(errc::bad_config,
                "explicit pos-weights are per-task; let mtl derive them per head");
  }

  // Union of posts across tasks, joined by id; first appearance wins, texts
  // must agree.
  std::vector<Post> union_posts;
  std::unordered_map<std::string, std::size_t> union_index;
  for (const auto& [task, dataset] : bundle.train) {
    if (!dataset.gold) {
      throw Error(errc::no_gold_labels,
                  std::string(to_string(task)) + " train split has no labels");
    }
    for (const auto& post : dataset.posts) {
      auto it = union_index.find(post.id);
      if (it == union_index.end()) {
        union_index.emplace(post.id, union_posts.size());
        union_posts.push_back(post);
      } else if (union_posts[it->second].text != post.text) {
        throw Error(errc::non_aligned_mtl_bundle,
                    "id '" + post.id + "' has different texts across tasks");
      }
    }
  }

  const auto features = featurize_posts(union_posts, fs);

  std::vector<Head> heads;
  heads.reserve(bundle.train.size());
  for (const auto& [task, dataset] : bundle.train) {
    Head head;
    head.task = task;
    auto tw = cfg.task_weights.find(task);
    head.weight = tw == cfg.task_weights.end() ? 1.0 : tw->second;
    head.gold = &*dataset.gold;
    head.row_of.assign(union_posts.size(), -1);
    for (std::size_t r = 0; r < dataset.posts.size(); ++r) {
      head.row_of[union_index.at(dataset.posts[r].id)] = static_cast<std::int32_t>(r);
    }
    head.loss = resolve_loss(cfg.loss, *dataset.gold);
    const std::size_t n_labels = labels_of(task).size();
    head.w = MatrixD(n_labels, fs.dim);
    head.b.assign(n_labels, 0.0);
    auto vit = bundle.val.find(task);
    if (vit != bundle.val.end()) {
      if (!vit->second.gold) {
        throw Error(errc::no_gold_labels,
                    std::string(to_string(task)) + " val split has no labels");
      }
      head.val = &vit->second;
      head.val_features = featurize_posts(vit->second.posts, fs);
    }
    heads.push_back(std::move(head));
  }

  TrainLog log = run_engine(features, heads, cfg);

  MtlResult result;
  const std::string fp = fingerprint(cfg);
  for (auto& head : heads) {
    LinearBRModel model(head.task, fs);
    model.weights() = std::move(head.best_w);
    model.bias() = std::move(head.best_b);
    model.set_config_fingerprint(fp);
    result.models.emplace(head.task, std::move(model));
  }
  result.log = std::move(log);
  return result;
}

}  // namespace polar
