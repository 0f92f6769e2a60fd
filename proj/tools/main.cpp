// liclab command-line harness: train / attack / defend / transfer / report.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "liclab/liclab.hpp"

namespace fs = std::filesystem;
using namespace liclab;

namespace {

std::string method_name(AttackMethod m) {
  return m == AttackMethod::FGSM ? "fgsm" : "pgd";
}

AttackMethod method_from_name(const std::string& s) {
  if (s == "fgsm") return AttackMethod::FGSM;
  if (s == "pgd") return AttackMethod::PGD;
  throw Error("unknown attack method: " + s);
}

std::string target_name(AttackTarget t) {
  return t == AttackTarget::Quality ? "quality" : "rate";
}

AttackTarget target_from_name(const std::string& s) {
  if (s == "quality") return AttackTarget::Quality;
  if (s == "rate") return AttackTarget::Rate;
  throw Error("unknown attack target: " + s);
}

using Echo = std::vector<std::pair<std::string, std::string>>;

// Every run drops the fully resolved settings next to its outputs so a
// result directory is self-describing.
void write_config_echo(const Echo& kv, const fs::path& out_dir) {
  std::ofstream os(out_dir / "config_echo.txt");
  if (!os) throw Error("cannot write config echo in " + out_dir.string());
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path p(out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw Error("cannot create output directory: " + out);
  return p;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

const char* const kAggregateHeader =
    "method,target,variant,lambda,mean_bpp_change,mean_psnr_change,"
    "mean_msssim_change";

struct AggRow {
  RunContext ctx;
  double bpp = 0.0, psnr = 0.0, msssim = 0.0;
};

void write_aggregate_csv(const std::vector<AggRow>& rows,
                         const fs::path& path) {
  CsvWriter w(path);
  w.write_row({kAggregateHeader});
  for (const auto& r : rows)
    w.write_row({r.ctx.method, r.ctx.target, r.ctx.variant,
                 fmt_float(r.ctx.lambda), fmt_float(r.bpp), fmt_float(r.psnr),
                 fmt_float(r.msssim)});
}

// Shared flag bundle for the attack-shaped subcommands. Method-specific
// defaults are applied after parsing: flags the user did not set fall back
// to the chosen method's canonical values.
struct AttackFlags {
  std::string method = "pgd";
  std::string target = "quality";
  double epsilon = -1.0;
  double step = -1.0;
  int steps = -1;
  std::uint64_t seed = 0;

  void add_to(CLI::App* sub) {
    sub->add_option("--method", method, "Attack method: fgsm|pgd")
        ->check(CLI::IsMember({"fgsm", "pgd"}));
    sub->add_option("--target", target, "Attack target: quality|rate")
        ->check(CLI::IsMember({"quality", "rate"}));
    sub->add_option("--epsilon", epsilon, "L-inf budget on [0,1] pixel scale");
    sub->add_option("--step", step, "Per-iteration step size");
    sub->add_option("--steps", steps, "Iteration count");
    sub->add_option("--seed", seed, "Attack RNG seed");
  }

  AttackConfig resolve() const {
    AttackConfig cfg = method == "fgsm" ? AttackConfig::fgsm_defaults()
                                        : AttackConfig::pgd_defaults();
    cfg.target = target_from_name(target);
    if (epsilon >= 0.0) cfg.epsilon = static_cast<float>(epsilon);
    if (step >= 0.0) cfg.step_size = static_cast<float>(step);
    if (steps >= 0) cfg.max_steps = steps;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
  }

  Echo echo(const AttackConfig& cfg) const {
    return {{"method", method_name(cfg.method)},
            {"target", target_name(cfg.target)},
            {"epsilon", fmt_float(cfg.epsilon)},
            {"step", fmt_float(cfg.step_size)},
            {"steps", std::to_string(cfg.max_steps)},
            {"seed", std::to_string(cfg.seed)}};
  }
};

std::vector<ImageRecord> load_test_images(const std::string& data_dir) {
  DatasetLoadResult ds = load_dataset(data_dir);
  print_warnings(ds.warnings);
  for (auto& rec : ds.images) rec.pixels = center_crop_mult8(rec.pixels);
  return std::move(ds.images);
}

// The baseline trainer logs one extra validation entry for the initial
// model; align rows to the per-epoch values.
void write_training_log(const TrainLog& log, const fs::path& path) {
  CsvWriter w(path);
  w.write_row({"epoch,train_loss,val_loss"});
  const size_t off = log.val_loss.size() - log.train_loss.size();
  for (size_t e = 0; e < log.train_loss.size(); ++e)
    w.write_row({std::to_string(e + 1), fmt_float(log.train_loss[e]),
                 fmt_float(log.val_loss[e + off])});
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string data, out;
  std::string variant = "factorized";
  double lambda = 1000.0;
  int epochs = 200;
  int batch_size = 16;
  int patch = 256;
  int patches_per_image = 4;
  double lr = 2e-4;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;
};

void cmd_train(const TrainArgs& a) {
  fs::path out = prepare_out_dir(a.out);

  TrainingConfig cfg;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = static_cast<float>(a.lr);
  cfg.max_epochs = a.epochs;
  cfg.patch_size = a.patch;
  cfg.lambda = static_cast<float>(a.lambda);
  cfg.seed = a.seed;
  cfg.checkpoint_every = a.checkpoint_every;
  cfg.validate();

  DatasetLoadResult ds = load_dataset(a.data, a.patch);
  print_warnings(ds.warnings);

  Rng patch_rng(a.seed * 977u + 3u);
  std::vector<Tensor> patches;
  for (int rep = 0; rep < a.patches_per_image; ++rep) {
    auto ep = epoch_patches(ds.images, a.patch, patch_rng);
    patches.insert(patches.end(), ep.begin(), ep.end());
  }
  std::cerr << "training on " << patches.size() << " patches from "
            << ds.images.size() << " images\n";

  CodecModel model =
      CodecModel::create(variant_from_name(a.variant), cfg.lambda, a.seed);
  TrainLog log = train_baseline(model, patches, cfg);
  save_model(model, out / "model.ckpt");

  write_training_log(log, out / "training_log.csv");

  write_config_echo({{"command", "train"},
                     {"data", a.data},
                     {"variant", a.variant},
                     {"lambda", fmt_float(a.lambda)},
                     {"epochs", std::to_string(a.epochs)},
                     {"batch_size", std::to_string(a.batch_size)},
                     {"patch", std::to_string(a.patch)},
                     {"patches_per_image", std::to_string(a.patches_per_image)},
                     {"lr", fmt_float(a.lr)},
                     {"seed", std::to_string(a.seed)}},
                    out);
  std::cerr << "final train loss " << log.train_loss.back() << ", val loss "
            << log.val_loss.back() << "\n";
}

// ---- attack --------------------------------------------------------------

struct AttackArgs {
  std::string model, data, out;
  AttackFlags atk;
  bool save_adv = false;
  bool no_heatmaps = false;
};

void cmd_attack(const AttackArgs& a) {
  fs::path out = prepare_out_dir(a.out);
  AttackConfig cfg = a.atk.resolve();
  CodecModel model = load_model(a.model);
  std::vector<ImageRecord> images = load_test_images(a.data);

  RunContext ctx{method_name(cfg.method), target_name(cfg.target),
                 variant_name(model.variant), model.lambda};
  fs::path traj_dir = out / "trajectories";
  fs::create_directories(traj_dir);

  std::vector<EvalRecord> records;
  for (size_t i = 0; i < images.size(); ++i) {
    const Tensor& x = images[i].pixels;
    AttackConfig per = cfg;
    per.seed = cfg.seed + i;

    ForwardResult fo = codec_forward(model, x, Mode::Eval);
    AttackResult atk = run_attack(model, x, per);
    ForwardResult fa = codec_forward(model, atk.x_adv, Mode::Eval);
    if (atk.zero_gradient)
      std::cerr << "warning: zero gradient on " << images[i].id << "\n";

    EvalRecord r;
    r.image_id = images[i].id;
    r.bpp_orig = fo.bpp;
    r.bpp_adv = fa.bpp;
    r.psnr_orig = psnr(x, fo.x_hat);
    r.psnr_adv = psnr(x, fa.x_hat);
    r.msssim_orig = ms_ssim(x, fo.x_hat);
    r.msssim_adv = ms_ssim(x, fa.x_hat);
    ChangeTriple c = change_metrics({r.bpp_orig, r.psnr_orig, r.msssim_orig},
                                    {r.bpp_adv, r.psnr_adv, r.msssim_adv});
    r.bpp_change = c.bpp_change;
    r.psnr_change = c.psnr_change;
    r.msssim_change = c.msssim_change;
    r.rd_cost_orig = r.bpp_orig + model.lambda * std::pow(10.0, -r.psnr_orig / 10.0);
    r.rd_cost_adv = r.bpp_adv + model.lambda * std::pow(10.0, -r.psnr_adv / 10.0);
    records.push_back(r);

    CsvWriter tw(traj_dir / (images[i].id + "_trajectory.csv"));
    tw.write_row({"step,loss"});
    for (size_t s = 0; s < atk.loss_trajectory.size(); ++s)
      tw.write_row({std::to_string(s + 1), fmt_float(atk.loss_trajectory[s])});

    if (!a.no_heatmaps) {
      Tensor heat = gradient_heatmap(model, x, cfg.target);
      save_png_gray(heat, out / (images[i].id + "_" + ctx.target + "_grad.png"));
    }
    if (a.save_adv)
      save_png_rgb(atk.x_adv, out / (images[i].id + "_adv.png"));
    std::cerr << images[i].id << ": bpp " << r.bpp_orig << " -> " << r.bpp_adv
              << ", psnr " << r.psnr_orig << " -> " << r.psnr_adv << "\n";
  }

  write_eval_csv(records, ctx, out / "eval.csv");
  AggRow agg{ctx, 0, 0, 0};
  for (const auto& r : records) {
    agg.bpp += r.bpp_change;
    agg.psnr += r.psnr_change;
    agg.msssim += r.msssim_change;
  }
  const double n = static_cast<double>(records.size());
  agg.bpp /= n;
  agg.psnr /= n;
  agg.msssim /= n;
  write_aggregate_csv({agg}, out / "aggregate.csv");

  Echo echo = a.atk.echo(cfg);
  echo.insert(echo.begin(), {{"command", "attack"},
                             {"model", a.model},
                             {"data", a.data},
                             {"variant", ctx.variant},
                             {"lambda", fmt_float(ctx.lambda)}});
  write_config_echo(echo, out);
  std::cerr << "mean bpp_change " << agg.bpp << ", mean psnr_change "
            << agg.psnr << ", mean msssim_change " << agg.msssim << "\n";
}

// ---- defend ----------------------------------------------------------------

struct DefendArgs {
  std::string model, data, out;
  AttackFlags atk;
  int epochs = 10;
  int batch_size = 8;
  int patch = 64;
  int patches_per_image = 4;
  double lr = 1e-4;
  std::uint64_t seed = 1;
};

void cmd_defend(const DefendArgs& a) {
  fs::path out = prepare_out_dir(a.out);
  AttackConfig atk = a.atk.resolve();
  if (atk.method != AttackMethod::PGD)
    throw CLI::ValidationError("--method", "defend requires the pgd method");
  CodecModel model = load_model(a.model);

  TrainingConfig cfg;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = static_cast<float>(a.lr);
  cfg.max_epochs = a.epochs;
  cfg.patch_size = a.patch;
  cfg.attack = atk;
  cfg.lambda = model.lambda;
  cfg.seed = a.seed;
  cfg.validate();

  DatasetLoadResult ds = load_dataset(a.data, a.patch);
  print_warnings(ds.warnings);
  Rng patch_rng(a.seed * 977u + 3u);
  std::vector<Tensor> patches;
  for (int rep = 0; rep < a.patches_per_image; ++rep) {
    auto ep = epoch_patches(ds.images, a.patch, patch_rng);
    patches.insert(patches.end(), ep.begin(), ep.end());
  }

  TrainLog log;
  DefenseReport report = pgd_train(model, patches, cfg, &log);
  save_model(model, out / "model_finetuned.ckpt");
  write_defense_csv(report, target_name(atk.target), out / "defense.csv");

  write_training_log(log, out / "training_log.csv");

  Echo echo = a.atk.echo(atk);
  echo.insert(echo.begin(), {{"command", "defend"},
                             {"model", a.model},
                             {"data", a.data},
                             {"epochs", std::to_string(a.epochs)},
                             {"batch_size", std::to_string(a.batch_size)},
                             {"patch", std::to_string(a.patch)},
                             {"lr", fmt_float(a.lr)},
                             {"train_seed", std::to_string(a.seed)}});
  write_config_echo(echo, out);
  std::cerr << "attack effect pre " << report.attack_effect_pre << " post "
            << report.attack_effect_post << "; adv R-D cost "
            << report.rd_cost_adv_pre << " -> " << report.rd_cost_adv_post
            << "\n";
}

// ---- transfer --------------------------------------------------------------

struct TransferArgs {
  std::string model, data, out;
  std::string target = "quality";
  double epsilon = 7.0 / 255.0;
  int q = 20;
  std::uint64_t seed = 0;
};

void cmd_transfer(const TransferArgs& a) {
  fs::path out = prepare_out_dir(a.out);
  CodecModel model = load_model(a.model);
  std::vector<ImageRecord> images = load_test_images(a.data);
  std::vector<Tensor> test_set;
  for (const auto& rec : images) test_set.push_back(rec.pixels);

  AttackConfig atk;
  atk.method = AttackMethod::FGSM;
  atk.target = target_from_name(a.target);
  atk.epsilon = static_cast<float>(a.epsilon);
  atk.step_size = atk.epsilon;  // single full-budget step
  atk.max_steps = 1;
  atk.seed = a.seed;
  atk.validate();

  DctCodecConfig dct{a.q};
  dct.validate();

  TransferTable table = transfer_attack_eval(model, test_set, atk, dct);
  write_transfer_csv(table, a.target, out / "transfer.csv");
  write_config_echo({{"command", "transfer"},
                     {"model", a.model},
                     {"data", a.data},
                     {"target", a.target},
                     {"epsilon", fmt_float(a.epsilon)},
                     {"q", std::to_string(a.q)},
                     {"seed", std::to_string(a.seed)}},
                    out);
  std::cerr << "lic: " << table.lic_origin.psnr << " dB / "
            << table.lic_origin.bpp << " bpp -> " << table.lic_adversary.psnr
            << " dB / " << table.lic_adversary.bpp << " bpp\n"
            << "dct: " << table.dct_origin.psnr << " dB / "
            << table.dct_origin.bpp << " bpp -> " << table.dct_adversary.psnr
            << " dB / " << table.dct_adversary.bpp << " bpp\n";
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

void cmd_report(const ReportArgs& a) {
  fs::path out = prepare_out_dir(a.out);
  std::map<std::tuple<std::string, std::string, std::string, double>,
           std::pair<AggRow, int>>
      groups;
  for (const auto& in : a.inputs) {
    auto rows = read_eval_csv(in);
    for (const auto& [ctx, rec] : rows) {
      auto key = std::make_tuple(ctx.method, ctx.target, ctx.variant,
                                 ctx.lambda);
      auto& [agg, count] = groups[key];
      agg.ctx = ctx;
      agg.bpp += rec.bpp_change;
      agg.psnr += rec.psnr_change;
      agg.msssim += rec.msssim_change;
      ++count;
    }
  }
  if (groups.empty()) throw Error("report: no records in the input CSVs");
  std::vector<AggRow> rows;
  for (auto& [key, val] : groups) {
    auto& [agg, count] = val;
    agg.bpp /= count;
    agg.psnr /= count;
    agg.msssim /= count;
    rows.push_back(agg);
  }
  write_aggregate_csv(rows, out / "summary.csv");
  Echo echo{{"command", "report"}};
  for (const auto& in : a.inputs) echo.emplace_back("input", in);
  write_config_echo(echo, out);
  std::cerr << "wrote " << rows.size() << " summary rows\n";
}

void add_common_io(CLI::App* sub, std::string& model, std::string& data,
                   std::string& out) {
  sub->add_option("--model", model, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--data", data, "Image directory (PNG/PPM)")
      ->required()
      ->check(CLI::ExistingDirectory);
  sub->add_option("--out", out, "Output directory")->required();
}

void enable_config_file(CLI::App* sub) {
  sub->set_config("--config", "", "Flat key=value config file; flags override");
  sub->allow_config_extras(CLI::config_extras_mode::error);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial robustness lab for learned image compression"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a baseline codec");
  train->add_option("--data", train_args.data, "Image directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--out", train_args.out, "Output directory")->required();
  train->add_option("--variant", train_args.variant,
                    "Codec variant: factorized|hyperprior")
      ->check(CLI::IsMember({"factorized", "hyperprior"}));
  train->add_option("--lambda", train_args.lambda, "R-D tradeoff weight");
  train->add_option("--epochs", train_args.epochs, "Training epochs");
  train->add_option("--batch-size", train_args.batch_size, "Minibatch size");
  train->add_option("--patch", train_args.patch, "Square patch size (mult of 8)");
  train->add_option("--patches-per-image", train_args.patches_per_image,
                    "Random crops drawn per source image");
  train->add_option("--lr", train_args.lr, "Adam learning rate");
  train->add_option("--seed", train_args.seed, "Training seed");
  train->add_option("--checkpoint-every", train_args.checkpoint_every,
                    "Periodic checkpoint interval in epochs (0 = off)");
  enable_config_file(train);
  train->callback([&] { cmd_train(train_args); });

  AttackArgs attack_args;
  auto* attack = app.add_subcommand("attack", "Attack a trained codec");
  add_common_io(attack, attack_args.model, attack_args.data, attack_args.out);
  attack_args.atk.add_to(attack);
  attack->add_flag("--save-adv", attack_args.save_adv,
                   "Write adversarial images as PNG");
  attack->add_flag("--no-heatmaps", attack_args.no_heatmaps,
                   "Skip gradient heatmap export");
  enable_config_file(attack);
  attack->callback([&] { cmd_attack(attack_args); });

  DefendArgs defend_args;
  auto* defend = app.add_subcommand("defend", "PGD adversarial finetuning");
  add_common_io(defend, defend_args.model, defend_args.data, defend_args.out);
  defend_args.atk.add_to(defend);
  defend->add_option("--epochs", defend_args.epochs, "Finetuning epochs");
  defend->add_option("--batch-size", defend_args.batch_size, "Minibatch size");
  defend->add_option("--patch", defend_args.patch, "Square patch size");
  defend->add_option("--patches-per-image", defend_args.patches_per_image,
                     "Random crops drawn per source image");
  defend->add_option("--lr", defend_args.lr, "Adam learning rate");
  defend->add_option("--train-seed", defend_args.seed, "Training seed");
  enable_config_file(defend);
  defend->callback([&] { cmd_defend(defend_args); });

  TransferArgs transfer_args;
  auto* transfer =
      app.add_subcommand("transfer", "One-step FGSM transfer to a DCT codec");
  add_common_io(transfer, transfer_args.model, transfer_args.data,
                transfer_args.out);
  transfer->add_option("--target", transfer_args.target,
                       "Attack target: quality|rate")
      ->check(CLI::IsMember({"quality", "rate"}));
  transfer->add_option("--epsilon", transfer_args.epsilon, "L-inf budget");
  transfer->add_option("--q", transfer_args.q, "DCT quantization quality 1-51");
  transfer->add_option("--seed", transfer_args.seed, "Attack seed");
  enable_config_file(transfer);
  transfer->callback([&] { cmd_transfer(transfer_args); });

  ReportArgs report_args;
  auto* report =
      app.add_subcommand("report", "Aggregate per-image eval CSVs");
  report->add_option("inputs", report_args.inputs, "Eval CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_args.out, "Output directory")->required();
  report->callback([&] { cmd_report(report_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
