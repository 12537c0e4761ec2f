#include "polar/losses.hpp"

#include <cmath>

namespace polar {

ClassWeights compute_pos_weights(const LabelMatrix& gold) {
  if (gold.rows() == 0) {
    throw Error(errc::empty_training_set, "cannot derive class weights from an empty matrix");
  }
  ClassWeights cw;
  cw.w.resize(gold.cols());
  for (std::size_t l = 0; l < gold.cols(); ++l) {
    const double n_pos = static_cast<double>(gold.positives(l));
    const double n_neg = static_cast<double>(gold.rows()) - n_pos;
    cw.w[l] = n_neg / std::max(n_pos, 1.0);
  }
  return cw;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

LossValue wbce(int y, double z, double w) {
  if (y == 1) {
    return {w * softplus(-z), -w * sigmoid(-z)};
  }
  return {softplus(z), sigmoid(z)};
}

LossValue bce(int y, double z) { return wbce(y, z, 1.0); }

LossValue focal(int y, double z, double gamma) {
  const double p = sigmoid(z);        // P(label = 1)
  const double q = sigmoid(-z);       // 1 - p, computed without cancellation
  const double log_p = -softplus(-z);
  const double log_q = -softplus(z);
  if (y == 1) {
    const double damp = std::pow(q, gamma);
    return {damp * -log_p, damp * (gamma * p * log_p - q)};
  }
  const double damp = std::pow(p, gamma);
  return {damp * -log_q, damp * (p - gamma * q * log_q)};
}

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::bce: return "bce";
    case LossKind::wbce: return "wbce";
    case LossKind::focal: return "focal";
  }
  return "?";
}

std::optional<LossKind> loss_kind_from_string(std::string_view name) {
  if (name == "bce") return LossKind::bce;
  if (name == "wbce") return LossKind::wbce;
  if (name == "focal") return LossKind::focal;
  return std::nullopt;
}

void LossConfig::validate(std::size_t n_labels) const {
  if (gamma < 0.0) {
    throw Error(errc::bad_config, "focal gamma must be >= 0");
  }
  if (kind == LossKind::wbce) {
    if (!weights) {
      throw Error(errc::bad_config, "wbce requires class weights");
    }
    if (weights->w.size() != n_labels) {
      throw Error(errc::bad_config,
                  "have " + std::to_string(weights->w.size()) + " class weights for " +
                      std::to_string(n_labels) + " labels");
    }
    for (double w : weights->w) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(errc::bad_config, "class weights must be finite and >= 0");
      }
    }
  }
}

BatchLoss batch_loss(const LabelMatrix& gold, const MatrixD& logits, const LossConfig& cfg) {
  if (gold.rows() != logits.rows || gold.cols() != logits.cols) {
    throw Error(errc::shape_mismatch,
                "gold is " + std::to_string(gold.rows()) + "x" + std::to_string(gold.cols()) +
                    ", logits are " + std::to_string(logits.rows) + "x" +
                    std::to_string(logits.cols));
  }
  cfg.validate(gold.cols());

  BatchLoss out;
  out.grad = MatrixD(logits.rows, logits.cols);
  const double n = static_cast<double>(logits.rows * logits.cols);
  double sum = 0.0;
  for (std::size_t r = 0; r < logits.rows; ++r) {
    for (std::size_t c = 0; c < logits.cols; ++c) {
      const int y = gold.at(r, c);
      const double z = logits.at(r, c);
      LossValue lv;
      switch (cfg.kind) {
        case LossKind::bce: lv = bce(y, z); break;
        case LossKind::wbce: lv = wbce(y, z, cfg.weights->w[c]); break;
        case LossKind::focal: lv = focal(y, z, cfg.gamma); break;
      }
      sum += lv.loss;
      out.grad.at(r, c) = lv.dloss_dz / n;
    }
  }
  out.mean_loss = sum / n;
  return out;
}

}  // namespace polar
