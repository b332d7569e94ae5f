// Copyright 2026 The esdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The esdlab command line. Everything lives here so the tests can drive
// commands in-process; esdlab.cpp is only main().
//
//   esdlab concurrence (--family F --h H [--omega W] | --bell B | --state FILE)
//   esdlab sweep --family F [--omega W] --h a:b:n --g a:b:n --channel C -o FILE
//   esdlab boundary --family F [--channel C] [--resolution N | --param a:b:n] -o FILE
//   esdlab ebc (--channel C [--p X | --g X] | --compose SPEC... | --kraus FILE)
//   esdlab tomo simulate|reconstruct|process ...
//
// Exit codes: 0 ok, 2 usage or parse, 3 invariant violation, 4 I/O.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "esdlab/esdlab.hpp"
#include "esdlab/io.hpp"

namespace esdlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitIo = 4;

struct CommandResult {
  int exit_code = kExitOk;
  std::optional<std::filesystem::path> output_path;
  std::string summary;
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::OutOfRange:
    case ErrorCode::StrengthOutOfRange:
      return kExitUsage;
    case ErrorCode::IOError:
      return kExitIo;
    default:
      return kExitInvariant;
  }
}

namespace detail {

[[noreturn]] inline void usage(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline double parse_number(const std::string& s, const std::string& what) {
  try {
    return esdlab::detail::parse_double(s);
  } catch (const Error&) {
    usage(what + ": '" + s + "' is not a number");
  }
}

/// start:stop:count, endpoints included.
inline GridAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) usage("axis '" + text + "' must be start:stop:count");
  const double count = parse_number(parts[2], "axis count");
  if (count < 1 || count != std::floor(count) || count > 1e6) usage("axis count must be a positive integer");
  return {parse_number(parts[0], "axis start"), parse_number(parts[1], "axis stop"), static_cast<int>(count)};
}

inline ChannelKind parse_channel_kind(const std::string& name) {
  if (name == "adc" || name == "amplitude-damping") return ChannelKind::AmplitudeDamping;
  if (name == "pdc" || name == "phase-damping") return ChannelKind::PhaseDamping;
  if (name == "bit-flip") return ChannelKind::BitFlip;
  if (name == "depolarizing") return ChannelKind::Depolarizing;
  if (name == "identity") return ChannelKind::Identity;
  usage("unknown channel '" + name + "'");
}

inline BellKind parse_bell(const std::string& name) {
  if (name == "phi-plus") return BellKind::PhiPlus;
  if (name == "psi-plus") return BellKind::PsiPlus;
  usage("unknown Bell state '" + name + "'");
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot read '" + path + "'");
  return parse_json(in);
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write '" + path + "'");
  writer(out);
  out.flush();
  if (!out) throw Error(ErrorCode::IOError, "write to '" + path + "' failed");
}

inline unsigned env_threads() {
  const char* raw = std::getenv("ESDLAB_THREADS");
  if (raw == nullptr || *raw == '\0') return std::max(1u, std::thread::hardware_concurrency());
  const double n = parse_number(raw, "ESDLAB_THREADS");
  if (n < 0 || n != std::floor(n) || n > 4096) usage("ESDLAB_THREADS must be a nonnegative integer");
  return static_cast<unsigned>(n);
}

struct FamilyFlags {
  std::string family;
  std::optional<double> h;
  std::optional<double> omega;

  void add_to(CLI::App* app, bool with_h) {
    app->add_option("--family", family, "adc-mixed or x-state");
    if (with_h) app->add_option("--h", h, "mixing parameter");
    app->add_option("--omega", omega, "Schmidt weight (adc-mixed)");
  }

  FamilySpec spec() const {
    if (family == "adc-mixed") {
      if (!omega) usage("adc-mixed needs --omega");
      return FamilySpec::adc_mixed(*omega);
    }
    if (family == "x-state") return FamilySpec::x_state();
    if (family.empty()) usage("--family is required");
    usage("unknown family '" + family + "'");
  }

  DensityMatrix state() const {
    if (!h) usage("--family needs --h");
    return family_state(spec(), *h);
  }
};

/// One --compose token: kind:strength, a bare kind, or gamma:omega=W,h=H
/// (the mixing channel of the Werner decomposition of that family member).
inline QubitChannel parse_channel_token(const std::string& token) {
  const auto colon = token.find(':');
  const std::string name = token.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
  if (name == "gamma") {
    std::optional<double> omega;
    std::optional<double> h;
    std::stringstream ss(arg);
    for (std::string kv; std::getline(ss, kv, ',');) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) usage("gamma expects omega=W,h=H");
      const double v = parse_number(kv.substr(eq + 1), kv.substr(0, eq));
      if (kv.substr(0, eq) == "omega") {
        omega = v;
      } else if (kv.substr(0, eq) == "h") {
        h = v;
      } else {
        usage("gamma takes only omega and h");
      }
    }
    if (!omega || !h) usage("gamma expects omega=W,h=H");
    return werner_decompose(mixed_family(*h, *omega), Side::B).gamma;
  }
  const auto kind = parse_channel_kind(name);
  if (kind == ChannelKind::Identity) return standard_channel(kind);
  if (arg.empty()) usage("channel '" + name + "' needs a strength, as in " + name + ":0.5");
  return standard_channel(kind, parse_number(arg, name));
}

inline QubitChannel channel_from_flags(const std::string& name, std::optional<double> strength) {
  const auto kind = parse_channel_kind(name);
  if (kind == ChannelKind::Identity) return standard_channel(kind);
  if (!strength) usage("--channel " + name + " needs a strength (--g or --p)");
  return standard_channel(kind, *strength);
}

inline std::string join_fixed9(std::span<const double> xs) {
  std::string s;
  for (double x : xs) {
    if (!s.empty()) s += ' ';
    s += format_fixed9(x);
  }
  return s;
}

}  // namespace detail

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  CommandResult execute(const std::vector<std::string>& args) {
    CLI::App app{"Entanglement dynamics under local channels", "esdlab"};
    // -h would collide with the --h mixing option
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", "esdlab 1.0.0");
    add_concurrence(app);
    add_sweep(app);
    add_boundary(app);
    add_ebc(app);
    add_tomo(app);

    std::vector<std::string> argv_storage{"esdlab"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    CommandResult result;
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
      result = action_();
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
    } catch (const CLI::CallForVersion& e) {
      out_ << e.what() << '\n';
    } catch (const CLI::ParseError& e) {
      err_ << "esdlab: " << e.what() << '\n';
      result.exit_code = kExitUsage;
    } catch (const Error& e) {
      err_ << "esdlab: " << e.what() << '\n';
      result.exit_code = exit_code_for(e.code());
    } catch (const std::exception& e) {
      err_ << "esdlab: " << e.what() << '\n';
      result.exit_code = kExitInvariant;
    }
    if (result.exit_code == kExitOk && !result.summary.empty()) out_ << result.summary;
    return result;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::function<CommandResult()> action_;

  // option storage; one command runs per Cli::execute
  detail::FamilyFlags family_;
  std::optional<std::string> bell_;
  std::optional<std::string> state_file_;
  std::string h_axis_;
  std::string g_axis_;
  std::optional<std::string> param_axis_;
  std::string channel_;
  std::optional<double> strength_;
  std::vector<std::string> compose_;
  std::optional<std::string> kraus_file_;
  std::string output_;
  int resolution_ = 50;
  std::uint64_t shots_ = 1000;
  std::optional<std::uint64_t> seed_;
  bool exact_ = false;
  std::string settings_ = "pauli36";
  std::string counts_file_;
  std::string method_ = "mle";
  int max_iter_ = 1000;
  double tol_ = 1e-10;
  std::optional<std::string> truth_bell_;
  std::optional<std::string> truth_state_;

  template <class Fn>
  void bind(CLI::App* sub, Fn fn) {
    sub->callback([this, fn] { action_ = [this, fn] { return (this->*fn)(); }; });
  }

  DensityMatrix input_state() const {
    const int sources = !family_.family.empty() + bell_.has_value() + state_file_.has_value();
    if (sources != 1) detail::usage("give exactly one of --family, --bell, --state");
    if (bell_) return DensityMatrix(bell_state(detail::parse_bell(*bell_)));
    if (state_file_) return state_from_json(detail::read_json_file(*state_file_));
    return family_.state();
  }

  // concurrence

  void add_concurrence(CLI::App& app) {
    auto* sub = app.add_subcommand("concurrence", "Concurrence of a two-qubit state");
    family_.add_to(sub, true);
    sub->add_option("--bell", bell_, "phi-plus or psi-plus");
    sub->add_option("--state", state_file_, "state JSON file");
    bind(sub, &Cli::run_concurrence);
  }

  CommandResult run_concurrence() {
    const auto r = concurrence(input_state());
    return {kExitOk, std::nullopt,
            "concurrence: " + format_fixed9(r.value) + "\nlambdas: " + detail::join_fixed9(r.lambdas) +
                "\n"};
  }

  // sweep

  void add_sweep(CLI::App& app) {
    auto* sub = app.add_subcommand("sweep", "Concurrence over an (h, g) grid, as CSV");
    family_.add_to(sub, false);
    sub->add_option("--h", h_axis_, "h axis start:stop:count")->required();
    sub->add_option("--g", g_axis_, "g axis start:stop:count")->required();
    sub->add_option("--channel", channel_, "adc, pdc, bit-flip or depolarizing")->required();
    sub->add_option("-o,--output", output_, "CSV path")->required();
    bind(sub, &Cli::run_sweep);
  }

  CommandResult run_sweep() {
    const auto family = family_.spec();
    const auto kind = detail::parse_channel_kind(channel_);
    const auto h = detail::parse_axis(h_axis_);
    const auto g = detail::parse_axis(g_axis_);
    const auto grid = sweep_grid(family, h, g, kind, detail::env_threads());
    detail::write_file(output_, [&](std::ostream& os) { write_sweep_csv(os, grid); });
    return {kExitOk, output_,
            "grid: " + std::to_string(grid.h_axis.size()) + " x " + std::to_string(grid.g_axis.size()) +
                " (h x g)\nzero-concurrence cells: " + std::to_string(grid.zero_cells()) +
                "\nwrote: " + output_ + "\n"};
  }

  // boundary

  void add_boundary(CLI::App& app) {
    auto* sub = app.add_subcommand("boundary", "Entanglement-breaking boundary curve, as CSV");
    family_.add_to(sub, false);
    sub->add_option("--channel", channel_, "local channel (default adc, or pdc for x-state)");
    sub->add_option("--resolution", resolution_, "default axis resolution");
    sub->add_option("--param", param_axis_, "explicit axis start:stop:count");
    sub->add_option("-o,--output", output_, "CSV path")->required();
    bind(sub, &Cli::run_boundary);
  }

  CommandResult run_boundary() {
    FamilySpec family;
    if (family_.family == "adc-mixed") {
      family = FamilySpec::adc_mixed(0.5);  // the axis runs over omega
    } else {
      family = family_.spec();
    }
    const bool x = family.kind == FamilyKind::XState;
    const auto kind = detail::parse_channel_kind(channel_.empty() ? (x ? "pdc" : "adc") : channel_);
    if (resolution_ < 2) detail::usage("--resolution must be at least 2");
    const auto axis = param_axis_ ? detail::parse_axis(*param_axis_).values() : boundary_axis(family, resolution_);
    for (double p : axis) {
      if (x ? (p < 0.0 || p > 1.0) : (p <= 0.0 || p >= 1.0)) {
        detail::usage("boundary parameter " + format_sig9(p) + " out of range");
      }
    }
    const auto curve = ebc_boundary_curve(family, axis, kind);
    detail::write_file(output_, [&](std::ostream& os) { write_boundary_csv(os, curve); });
    std::size_t absent = 0;
    for (const auto& p : curve) absent += !p.critical.has_value();
    return {kExitOk, output_,
            "points: " + std::to_string(curve.size()) + "\nno sudden death: " + std::to_string(absent) +
                "\nwrote: " + output_ + "\n"};
  }

  // ebc

  void add_ebc(CLI::App& app) {
    auto* sub = app.add_subcommand("ebc", "Entanglement-breaking test of a qubit channel");
    sub->add_option("--channel", channel_, "adc, pdc, bit-flip, depolarizing or identity");
    sub->add_option("--p,--g", strength_, "channel strength");
    sub->add_option("--compose", compose_, "channels applied right to left, e.g. adc:0.7 gamma:omega=0.12,h=0.21");
    sub->add_option("--kraus", kraus_file_, "channel JSON file");
    bind(sub, &Cli::run_ebc);
  }

  CommandResult run_ebc() {
    const int sources = !channel_.empty() + !compose_.empty() + kraus_file_.has_value();
    if (sources != 1) detail::usage("give exactly one of --channel, --compose, --kraus");
    QubitChannel ch = standard_channel(ChannelKind::Identity);
    if (!channel_.empty()) {
      ch = detail::channel_from_flags(channel_, strength_);
    } else if (kraus_file_) {
      ch = channel_from_json(detail::read_json_file(*kraus_file_));
    } else {
      ch = detail::parse_channel_token(compose_.back());
      for (auto it = compose_.rbegin() + 1; it != compose_.rend(); ++it) {
        ch = compose_channels(detail::parse_channel_token(*it), ch);
      }
    }
    const bool ebc = is_entanglement_breaking(ch);
    const auto choi = choi_state(ch);
    const auto ppt = negativity_ppt(choi.state());
    const double c = concurrence(choi.state()).value;
    return {kExitOk, std::nullopt,
            std::string("EBC: ") + (ebc ? "true" : "false") + "\nChoi min PT eigenvalue: " +
                format_sig9(ppt.min_eigenvalue) + "\nChoi concurrence: " + format_sig9(c) + "\n"};
  }

  // tomo

  void add_tomo(CLI::App& app) {
    auto* tomo = app.add_subcommand("tomo", "Simulated state and process tomography");
    tomo->require_subcommand(1);

    auto* sim = tomo->add_subcommand("simulate", "Simulate coincidence counts (JSON lines)");
    family_.add_to(sim, true);
    sim->add_option("--bell", bell_, "phi-plus or psi-plus");
    sim->add_option("--state", state_file_, "state JSON file");
    sim->add_option("--settings", settings_, "pauli36 or minimal16");
    sim->add_option("--shots", shots_, "shots per setting");
    sim->add_option("--seed", seed_, "random seed (required unless --exact)");
    sim->add_flag("--exact", exact_, "write noiseless counts round(p * shots)");
    sim->add_option("-o,--output", output_, "counts path (default stdout)");
    bind(sim, &Cli::run_simulate);

    auto* rec = tomo->add_subcommand("reconstruct", "Reconstruct a state from counts");
    rec->add_option("--counts", counts_file_, "JSON-lines counts")->required();
    rec->add_option("--method", method_, "mle or linear");
    rec->add_option("--max-iter", max_iter_, "MLE iteration cap");
    rec->add_option("--tol", tol_, "MLE log-likelihood gain tolerance");
    rec->add_option("--truth-bell", truth_bell_, "report fidelity to this Bell state");
    rec->add_option("--truth-state", truth_state_, "report fidelity to this state JSON");
    rec->add_option("-o,--output", output_, "report JSON path");
    bind(rec, &Cli::run_reconstruct);

    auto* proc = tomo->add_subcommand("process", "Simulated process tomography of a channel");
    proc->add_option("--channel", channel_, "adc, pdc, bit-flip, depolarizing, identity or effective-adc")
        ->required();
    proc->add_option("--p,--g", strength_, "channel strength");
    family_.add_to(proc, true);
    proc->add_option("--shots", shots_, "shots per setting");
    proc->add_option("--seed", seed_, "random seed (required unless --exact)");
    proc->add_flag("--exact", exact_, "use noiseless frequencies");
    proc->add_option("-o,--output", output_, "channel JSON path");
    bind(proc, &Cli::run_process);
  }

  SettingsKind settings_kind() const {
    if (settings_ == "pauli36") return SettingsKind::Pauli36;
    if (settings_ == "minimal16") return SettingsKind::Minimal16;
    detail::usage("unknown settings '" + settings_ + "'");
  }

  void require_seed_unless_exact() const {
    if (!exact_ && !seed_) detail::usage("--seed is required");
    if (shots_ < 1) detail::usage("--shots must be positive");
  }

  template <class Writer>
  void emit(Writer&& writer) {
    if (output_.empty()) {
      writer(out_);
    } else {
      detail::write_file(output_, writer);
    }
  }

  std::optional<std::filesystem::path> written() const {
    if (output_.empty()) return std::nullopt;
    return output_;
  }

  std::string wrote_line() const { return output_.empty() ? "" : "wrote: " + output_ + "\n"; }

  CommandResult run_simulate() {
    require_seed_unless_exact();
    const auto rho = input_state();
    const auto settings = tomography_settings(settings_kind());
    const auto records = exact_ ? expected_counts(rho, settings, shots_)
                                : simulate_counts(rho, settings, shots_, *seed_);
    emit([&](std::ostream& os) { write_count_lines(os, records); });
    return {kExitOk, written(),
            output_.empty() ? "" : "settings: " + std::to_string(records.size()) + "\n" + wrote_line()};
  }

  CommandResult run_reconstruct() {
    if (truth_bell_ && truth_state_) detail::usage("give at most one of --truth-bell, --truth-state");
    std::ifstream in(counts_file_);
    if (!in) throw Error(ErrorCode::IOError, "cannot read '" + counts_file_ + "'");
    const auto records = read_count_lines(in);
    if (records.empty()) detail::usage("no count records in '" + counts_file_ + "'");
    std::optional<DensityMatrix> truth;
    if (truth_bell_) truth = DensityMatrix(bell_state(detail::parse_bell(*truth_bell_)));
    if (truth_state_) truth = state_from_json(detail::read_json_file(*truth_state_));
    // every label in either settings family is a Pauli36 label
    const auto dictionary = tomography_settings(SettingsKind::Pauli36);
    ReconstructionReport rep{DensityMatrix::maximally_mixed(4), std::nullopt, 0, 0.0, {}};
    if (method_ == "mle") {
      if (max_iter_ < 1) detail::usage("--max-iter must be at least 1");
      rep = mle_reconstruct(records, dictionary, max_iter_, tol_, truth);
    } else if (method_ == "linear") {
      rep.estimate = linear_inversion(records, dictionary);
      rep.log_likelihood =
          esdlab::detail::log_likelihood(esdlab::detail::observations(records, dictionary), rep.estimate.matrix());
      if (truth) rep.fidelity_to_truth = fidelity(rep.estimate, *truth);
    } else {
      detail::usage("unknown method '" + method_ + "'");
    }
    if (!output_.empty()) {
      detail::write_file(output_, [&](std::ostream& os) { os << to_json(rep).dump(2) << '\n'; });
    }
    std::string summary = "iterations: " + std::to_string(rep.iterations) +
                          "\nlog-likelihood: " + format_sig9(rep.log_likelihood) + "\n";
    if (rep.fidelity_to_truth) summary += "fidelity: " + format_fixed9(*rep.fidelity_to_truth) + "\n";
    return {kExitOk, written(), summary + wrote_line()};
  }

  CommandResult run_process() {
    require_seed_unless_exact();
    QubitChannel truth = standard_channel(ChannelKind::Identity);
    if (channel_ == "effective-adc") {
      if (!family_.omega || !family_.h || !strength_) {
        detail::usage("effective-adc needs --omega, --h and --g");
      }
      truth = effective_adc_kraus(*family_.omega, *family_.h, *strength_);
    } else {
      truth = detail::channel_from_flags(channel_, strength_);
    }
    const auto result = process_tomography_full(truth, shots_, seed_.value_or(0),
                                                exact_ ? Sampling::Expected : Sampling::Binomial);
    if (!output_.empty()) {
      detail::write_file(output_, [&](std::ostream& os) { os << to_json(result.channel).dump(2) << '\n'; });
    }
    const std::string summary = "kraus operators: " + std::to_string(result.channel.kraus().size()) +
                                "\nChoi distance to truth: " +
                                format_sig9(choi_distance(result.channel, truth)) + "\n";
    return {kExitOk, written(), summary + wrote_line()};
  }
};

inline CommandResult execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.execute(args);
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return execute(args, out, err).exit_code;
}

}  // namespace esdlab::cli
