#include "liclab/defense.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "liclab/csv.hpp"
#include "liclab/optimizer.hpp"

namespace liclab {

namespace {

struct SplitSets {
  std::vector<Tensor> train, val;
};

SplitSets split_dataset(const std::vector<Tensor>& patches,
                        std::uint64_t seed) {
  std::vector<size_t> order(patches.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed ^ 0x5eedULL);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i) - 1)]);
  size_t n_val = std::max<size_t>(1, patches.size() / 10);
  if (n_val >= patches.size()) n_val = patches.size() > 1 ? 1 : 0;
  SplitSets s;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_val ? s.val : s.train).push_back(patches[order[i]]);
  if (s.train.empty()) {
    s.train = patches;
    s.val = patches;
  }
  return s;
}

struct DefenseEval {
  double rd_clean = 0.0, rd_adv = 0.0, attack_effect = 0.0;
};

DefenseEval eval_model(const CodecModel& model, const std::vector<Tensor>& set,
                       const AttackConfig& attack_cfg, float lambda) {
  DefenseEval e;
  for (const auto& x : set) {
    ForwardResult fo = codec_forward(model, x, Mode::Eval);
    AttackResult atk = run_attack(model, x, attack_cfg);
    ForwardResult fa = codec_forward(model, atk.x_adv, Mode::Eval);
    const double mse_o = std::pow(10.0, -psnr(x, fo.x_hat) / 10.0);
    const double mse_a = std::pow(10.0, -psnr(x, fa.x_hat) / 10.0);
    e.rd_clean += fo.bpp + lambda * mse_o;
    e.rd_adv += fa.bpp + lambda * mse_a;
    if (attack_cfg.target == AttackTarget::Quality) {
      const double po = psnr(x, fo.x_hat);
      e.attack_effect += (psnr(x, fa.x_hat) - po) / po;
    } else {
      e.attack_effect += fa.bpp / fo.bpp;
    }
  }
  const double n = static_cast<double>(set.size());
  e.rd_clean /= n;
  e.rd_adv /= n;
  e.attack_effect /= n;
  return e;
}

}  // namespace

RobustnessSummary evaluate_robustness(const CodecModel& model,
                                      const std::vector<Tensor>& test_set,
                                      const AttackConfig& attack_cfg,
                                      float lambda) {
  if (test_set.empty()) throw Error("evaluate_robustness: empty test set");
  RobustnessSummary s;
  int idx = 0;
  for (const auto& x : test_set) {
    AttackConfig cfg = attack_cfg;
    cfg.seed = attack_cfg.seed + static_cast<std::uint64_t>(idx);

    ForwardResult fo = codec_forward(model, x, Mode::Eval);
    AttackResult atk = run_attack(model, x, cfg);
    ForwardResult fa = codec_forward(model, atk.x_adv, Mode::Eval);

    EvalRecord r;
    r.image_id = "img" + std::to_string(idx);
    r.bpp_orig = fo.bpp;
    r.bpp_adv = fa.bpp;
    r.psnr_orig = psnr(x, fo.x_hat);
    r.psnr_adv = psnr(x, fa.x_hat);
    r.msssim_orig = ms_ssim(x, fo.x_hat);
    r.msssim_adv = ms_ssim(x, fa.x_hat);
    if (r.psnr_orig == r.psnr_adv) {
      // Covers the degenerate identical-reconstruction case where Eq.-4
      // style relative changes are undefined (infinite PSNR).
      r.bpp_change = r.bpp_orig > 0.0 ? r.bpp_adv / r.bpp_orig : 1.0;
      r.psnr_change = 0.0;
      r.msssim_change = 0.0;
    } else {
      ChangeTriple c = change_metrics(
          {r.bpp_orig, r.psnr_orig, r.msssim_orig},
          {r.bpp_adv, r.psnr_adv, r.msssim_adv});
      r.bpp_change = c.bpp_change;
      r.psnr_change = c.psnr_change;
      r.msssim_change = c.msssim_change;
    }
    const double mse_o = std::pow(10.0, -r.psnr_orig / 10.0);
    const double mse_a = std::pow(10.0, -r.psnr_adv / 10.0);
    r.rd_cost_orig = r.bpp_orig + lambda * mse_o;
    r.rd_cost_adv = r.bpp_adv + lambda * mse_a;

    s.mean_bpp_change += r.bpp_change;
    s.mean_psnr_change += r.psnr_change;
    s.mean_msssim_change += r.msssim_change;
    s.mean_rd_cost_orig += r.rd_cost_orig;
    s.mean_rd_cost_adv += r.rd_cost_adv;
    s.records.push_back(std::move(r));
    ++idx;
  }
  const double n = static_cast<double>(test_set.size());
  s.mean_bpp_change /= n;
  s.mean_psnr_change /= n;
  s.mean_msssim_change /= n;
  s.mean_rd_cost_orig /= n;
  s.mean_rd_cost_adv /= n;
  return s;
}

DefenseReport pgd_train(CodecModel& model, const std::vector<Tensor>& patches,
                        const TrainingConfig& cfg, TrainLog* log_out) {
  cfg.validate();
  if (patches.empty()) throw Error("pgd_train: empty dataset");
  if (cfg.attack.method != AttackMethod::PGD)
    throw Error("pgd_train: inner attack must be PGD");

  SplitSets sets = split_dataset(patches, cfg.seed);

  DefenseReport report;
  {
    DefenseEval pre = eval_model(model, sets.val, cfg.attack, cfg.lambda);
    report.rd_cost_clean_pre = pre.rd_clean;
    report.rd_cost_adv_pre = pre.rd_adv;
    report.attack_effect_pre = pre.attack_effect;
  }

  Adam opt(model.params(), cfg.learning_rate);
  Rng rng(cfg.seed);
  TrainLog log;

  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::vector<size_t> idx(sets.train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Tensor> shuffled(sets.train.size());

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[rng.uniform_int(0, static_cast<int>(i) - 1)]);
    for (size_t i = 0; i < idx.size(); ++i) shuffled[i] = sets.train[idx[i]];

    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t off = 0; off < shuffled.size();
         off += static_cast<size_t>(cfg.batch_size)) {
      const size_t count =
          std::min<size_t>(cfg.batch_size, shuffled.size() - off);
      Tensor batch = stack_batch(shuffled, off, count);

      // Clean step.
      {
        ForwardResult fr = codec_forward(model, batch, Mode::Train, &rng);
        Tensor loss = rd_loss(batch, fr, cfg.lambda);
        if (!std::isfinite(loss.item()))
          throw Error("pgd_train: NaN loss (clean) at epoch " +
                      std::to_string(epoch) + ", batch " +
                      std::to_string(batches));
        opt.zero_grad();
        backward(loss);
        opt.step();
        epoch_loss += loss.item_precise();
      }

      // Adversarial batch against the CURRENT model, then one step on it.
      AttackConfig atk = cfg.attack;
      atk.seed = cfg.attack.seed ^ (static_cast<std::uint64_t>(epoch) << 20 |
                                    batches);
      AttackResult adv = run_attack(model, batch, atk);
      {
        ForwardResult fr =
            codec_forward(model, adv.x_adv, Mode::Train, &rng);
        Tensor loss = rd_loss(adv.x_adv, fr, cfg.lambda);
        if (!std::isfinite(loss.item()))
          throw Error("pgd_train: NaN loss (adversarial) at epoch " +
                      std::to_string(epoch) + ", batch " +
                      std::to_string(batches));
        opt.zero_grad();
        backward(loss);
        opt.step();
        epoch_loss += loss.item_precise();
      }
      ++batches;
    }
    if (!model.params_finite())
      throw Error("pgd_train: non-finite parameters at epoch " +
                  std::to_string(epoch));
    log.train_loss.push_back(epoch_loss / (2.0 * static_cast<double>(batches)));
    const double vl =
        validation_loss(model, sets.val, cfg.lambda, cfg.seed);
    log.val_loss.push_back(vl);
    if (cfg.early_stop) {
      if (vl < best_val - 1e-6) {
        best_val = vl;
        stale = 0;
      } else if (++stale >= cfg.patience) {
        break;
      }
    }
  }
  log.optimizer_steps = opt.step_count();

  {
    DefenseEval post = eval_model(model, sets.val, cfg.attack, cfg.lambda);
    report.rd_cost_clean_post = post.rd_clean;
    report.rd_cost_adv_post = post.rd_adv;
    report.attack_effect_post = post.attack_effect;
  }
  if (cfg.max_epochs > 0) {
    report.finetuning_effect_clean =
        rd_cost_change(report.rd_cost_clean_pre, report.rd_cost_clean_post);
    report.finetuning_effect_adv =
        rd_cost_change(report.rd_cost_adv_pre, report.rd_cost_adv_post);
  }
  if (log_out) *log_out = log;
  return report;
}

void write_defense_csv(const DefenseReport& r, const std::string& target,
                       const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"target,row,attack_effect,rd_cost_clean,rd_cost_adv"});
  w.write_row({target, "pretrained", fmt_float(r.attack_effect_pre),
               fmt_float(r.rd_cost_clean_pre), fmt_float(r.rd_cost_adv_pre)});
  w.write_row({target, "finetuned", fmt_float(r.attack_effect_post),
               fmt_float(r.rd_cost_clean_post),
               fmt_float(r.rd_cost_adv_post)});
  w.write_row({target, "finetuning_effect", "",
               fmt_float(r.finetuning_effect_clean),
               fmt_float(r.finetuning_effect_adv)});
}

}  // namespace liclab
