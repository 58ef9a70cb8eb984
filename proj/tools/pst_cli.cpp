// pst: design, solve and simulate perfect-transfer spin chains.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "pst/pst.hpp"

namespace {

using namespace pst;

struct ChainOptions {
  long long n = 0;
  long long multiplet = 0;
  long long delta = 0;
  bool equidistant = false;
  long long gap = 1;
  bool uniform = false;
  double alpha = 1.0;
  std::string couplings_file;
  std::string precision;
};

struct DriveOptions {
  std::optional<double> field;
  bool tune_phase = false;
  double target_phase = pi / 2;
};

// Chain configuration resolved into a coupling profile and, when the chain was
// designed from a spectrum, that spectrum.
struct Chain {
  std::optional<PstSpectrum> spectrum;
  CouplingProfile profile;
  Precision precision = Precision::standard;
  double tau = pi;
};

void add_chain_options(CLI::App* cmd, ChainOptions& o) {
  cmd->add_option("--n", o.n, "number of sites");
  cmd->add_option("--multiplet", o.multiplet, "contraction order m; 0 keeps the inverted quadratic spectrum");
  cmd->add_option("--delta", o.delta, "final contraction amount (even)");
  cmd->add_flag("--equidistant", o.equidistant, "use the equidistant ladder instead");
  cmd->add_option("--gap", o.gap, "level spacing of the equidistant ladder");
  cmd->add_flag("--uniform", o.uniform, "uniform chain J=1 with boundary couplings --alpha");
  cmd->add_option("--alpha", o.alpha, "boundary coupling of the uniform chain");
  cmd->add_option("--couplings", o.couplings_file, "read couplings from an i,J CSV file instead");
  cmd->add_option("--precision", o.precision, "standard, extended or quad (default: $PST_PRECISION or standard)");
}

void add_drive_options(CLI::App* cmd, DriveOptions& d) {
  cmd->add_option("--field", d.field, "uniform magnetic field b");
  cmd->add_flag("--tune-phase", d.tune_phase, "choose b so that the mirror phase equals --target-phase");
  cmd->add_option("--target-phase", d.target_phase, "mirror phase for --tune-phase (default pi/2)");
}

PstSpectrum build_spectrum(const ChainOptions& o) {
  if (o.n <= 0) throw invalid_argument("--n is required");
  if (o.equidistant) return equidistant_spectrum(o.n, o.gap);
  if (o.multiplet == 0) {
    if (o.delta != 0) throw invalid_argument("--delta needs --multiplet >= 1");
    return inverted_quadratic_spectrum(o.n);
  }
  return multiplet_spectrum(o.n, o.multiplet, o.delta);
}

Chain build_chain(const ChainOptions& o) {
  const Precision precision = o.precision.empty() ? default_precision() : parse_precision(o.precision);
  if (!o.couplings_file.empty()) {
    std::ifstream in(o.couplings_file);
    if (!in) throw invalid_argument("cannot open " + o.couplings_file, "E_IO");
    return Chain{std::nullopt, csv::read_couplings(in), precision, pi};
  }
  if (o.uniform) {
    if (o.n <= 0) throw invalid_argument("--n is required");
    return Chain{std::nullopt, boundary_coupling_profile(std::size_t(o.n), o.alpha), precision, pi};
  }
  PstSpectrum spec = build_spectrum(o);
  const auto diag = validate_pst(spec);
  CouplingProfile profile = couplings_from_spectrum(spec, precision);
  return Chain{std::move(spec), std::move(profile), precision, diag.valid() ? diag.transfer_time : pi};
}

double resolve_field(const Chain& c, const DriveOptions& d) {
  if (d.tune_phase) {
    if (d.field) throw invalid_argument("--field and --tune-phase are mutually exclusive");
    return tuned_field(c.profile, c.tau, d.target_phase);
  }
  return d.field.value_or(0.0);
}

// CSV goes to --output or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw invalid_argument("cannot write " + path, "E_IO");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void report(const std::string& key, const std::string& value) { std::cerr << key << ' ' << value << '\n'; }
void report(const std::string& key, double value) { report(key, csv::format_real(value)); }

TwoQubitAmplitudes parse_payload(const std::string& spec, std::uint64_t seed) {
  if (spec == "random") return random_two_qubit_state(seed);
  if (spec.rfind("bell:", 0) == 0) return bell_amplitudes(parse_bell_state(spec.substr(5)));
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw invalid_argument("cannot open " + spec.substr(5), "E_IO");
    return csv::read_protocol_report(in).decoded;
  }
  const auto cells = csv::split(spec);
  TwoQubitAmplitudes a{};
  if (cells.size() == 4) {
    for (std::size_t k = 0; k < 4; ++k) a[k] = csv::parse_real(cells[k]);
  } else if (cells.size() == 8) {
    for (std::size_t k = 0; k < 4; ++k) a[k] = cplx(csv::parse_real(cells[2 * k]), csv::parse_real(cells[2 * k + 1]));
  } else {
    throw invalid_argument("--input expects bell:<state>, random, file:<report.csv>, 4 reals or 8 re,im values",
                           "E_PROTOCOL");
  }
  return a;
}

int run_spectrum(const ChainOptions& o, const std::string& out) {
  if (o.uniform || !o.couplings_file.empty()) throw invalid_argument("spectrum needs a designed chain, not --uniform or --couplings");
  const PstSpectrum spec = build_spectrum(o);
  const auto d = validate_pst(spec);
  Sink sink(out);
  csv::write_spectrum(sink.stream(), spec);
  report("pst_valid", d.valid() ? "yes" : "no");
  if (d.valid()) report("transfer_time", d.transfer_time);
  return 0;
}

int run_couplings(const ChainOptions& o, const std::string& out) {
  const Chain c = build_chain(o);
  Sink sink(out);
  csv::write_couplings(sink.stream(), c.profile);
  report("precision", to_string(c.precision));
  if (c.spectrum) report("roundtrip_error", roundtrip_error(*c.spectrum, c.profile, c.precision));
  report("max_coupling", c.profile.max_coupling());
  return 0;
}

int run_fidelity(const ChainOptions& o, const DriveOptions& d, const std::string& state_name,
                 std::optional<double> tmin, std::optional<double> tmax, std::size_t samples, const std::string& out) {
  const Chain c = build_chain(o);
  const BellState state = parse_bell_state(state_name);
  const double field = resolve_field(c, d);
  const Eigensystem es = diagonalize(c.profile, field);
  const FidelityTrace tr = fidelity_trace(es, state, tmin.value_or(0.0), tmax.value_or(2.0 * c.tau), samples);
  Sink sink(out);
  csv::write_trace(sink.stream(), tr);

  report("field", field);
  report("transfer_time", c.tau);
  report("abs_f_at_transfer_time", std::abs(bell_fidelity(es, state, c.tau)));
  if (state == BellState::psi2_plus || state == BellState::psi2_minus)
    report("pair_modulus_at_transfer_time", pair_transfer_modulus(es, c.tau));
  const std::size_t best = tr.argmax();
  Peak peak{tr.times[best], tr.modulus(best)};
  if (best > 0 && best + 1 < tr.size()) {
    const double step = tr.times[1] - tr.times[0];
    try {
      const Peak refined = peak_refine(es, state, tr.times[best], step);
      if (refined.modulus >= peak.modulus) peak = refined;
    } catch (const bracket_failure&) {
    }
  }
  report("peak_time", peak.time);
  report("peak_abs_f", peak.modulus);
  return 0;
}

int run_localization(const ChainOptions& o, std::size_t depth, double factor, const std::string& weights_path,
                     const std::string& out) {
  const Chain c = build_chain(o);
  const Eigensystem es = diagonalize(c.profile);
  const auto sites = boundary_sites(es.n, depth);
  const Localization loc = localize(es, sites, factor);
  Sink sink(out);
  csv::write_eigenvectors(sink.stream(), es);

  std::ostringstream table;
  table << "state,energy,boundary_weight,dominated\n";
  for (std::size_t k = 0; k < es.n; ++k) {
    const bool flagged = std::find(loc.dominated.begin(), loc.dominated.end(), k) != loc.dominated.end();
    table << (k + 1) << ',' << csv::format_real(es.values(Eigen::Index(k))) << ',' << csv::format_real(loc.weights[k])
          << ',' << (flagged ? 1 : 0) << '\n';
  }
  if (!weights_path.empty()) {
    std::ofstream w(weights_path);
    if (!w) throw invalid_argument("cannot write " + weights_path, "E_IO");
    w << table.str();
  } else {
    std::cerr << table.str();
  }
  std::string list;
  for (std::size_t k : loc.dominated) list += (list.empty() ? "" : ",") + std::to_string(k + 1);
  report("dominated_count", std::to_string(loc.dominated.size()));
  report("dominated_states", list.empty() ? "-" : list);
  if (!loc.dominated.empty()) report("separation", loc.separation);
  return 0;
}

int run_phase(const ChainOptions& o, const DriveOptions& d, const std::string& out) {
  const Chain c = build_chain(o);
  const double field = resolve_field(c, d);
  const MirrorPhase mp = mirror_phase(diagonalize(c.profile, field), c.tau);
  Sink sink(out);
  auto& s = sink.stream();
  s << "quantity,value\n";
  s << "transfer_time," << csv::format_real(mp.tau) << '\n';
  s << "field," << csv::format_real(field) << '\n';
  s << "phi," << csv::format_real(mp.phi) << '\n';
  if (c.spectrum && field == 0.0) s << "phi_predicted," << csv::format_real(predicted_mirror_phase(*c.spectrum)) << '\n';
  s << "site_independence_residual," << csv::format_real(mp.site_independence_residual) << '\n';
  s << "min_mirror_modulus," << csv::format_real(mp.min_modulus) << '\n';
  s << "two_particle_phase," << csv::format_real(n_particle_phase(mp.phi, 2)) << '\n';
  s << "field_for_target," << csv::format_real(field + field_for_phase(mp.phi, d.target_phase, mp.tau)) << '\n';
  return 0;
}

int run_protocol(const ChainOptions& o, const DriveOptions& d, const std::string& input, std::uint64_t seed,
                 bool site_order, const std::string& out) {
  const Chain c = build_chain(o);
  const TwoQubitAmplitudes amps = parse_payload(input, seed);
  const double field = resolve_field(c, d);
  const TransferResult r =
      transfer_two_qubit(amps, c.profile, field, c.tau, site_order ? QubitOrder::sites : QubitOrder::mirrored);
  Sink sink(out);
  csv::write_protocol_report(sink.stream(), r);
  report("field", field);
  report("fidelity", r.fidelity);
  report("global_phase", r.global_phase);
  report("leakage", r.leakage);
  if (r.leakage_warning) std::cerr << "warning: leakage " << csv::format_real(r.leakage) << " outside the decoded subspace\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Perfect state transfer in XX spin chains.\n"
      "Energies are measured in units of the central multiplet spacing, so designed\n"
      "chains transfer at t = pi. Site numbers are 1-based."};
  app.require_subcommand(1);

  ChainOptions chain;
  DriveOptions drive;
  std::string output;
  std::string state = "psi1+";
  std::optional<double> tmin, tmax;
  std::size_t samples = 2001;
  std::size_t depth = 2;
  double factor = 5.0;
  std::string weights_path;
  std::string input = "bell:psi1+";
  std::uint64_t seed = 0;
  bool site_order = false;

  auto* spectrum = app.add_subcommand("spectrum", "write the designed spectrum (nu,epsilon)");
  auto* couplings = app.add_subcommand("couplings", "reconstruct couplings from the spectrum (i,J)");
  auto* fidelity = app.add_subcommand("fidelity", "Bell-state transfer fidelity trace (t,abs_f,re_f,im_f)");
  auto* localization = app.add_subcommand("localization", "eigenvectors (site,c1..cN) and boundary weights");
  auto* phase = app.add_subcommand("phase", "mirror phase at the transfer time (quantity,value)");
  auto* protocol = app.add_subcommand("protocol", "two-qubit parity-encoding transfer (component,re,im)");

  for (auto* cmd : {spectrum, couplings, fidelity, localization, phase, protocol}) {
    add_chain_options(cmd, chain);
    cmd->add_option("-o,--output", output, "output CSV path (default stdout)");
  }
  for (auto* cmd : {fidelity, phase, protocol}) add_drive_options(cmd, drive);

  fidelity->add_option("--state", state, "psi1+, psi1-, psi2+ or psi2-");
  fidelity->add_option("--tmin", tmin, "start time (default 0)");
  fidelity->add_option("--tmax", tmax, "end time (default twice the transfer time)");
  fidelity->add_option("--samples", samples, "grid points including both ends (default 2001)");

  localization->add_option("--depth", depth, "boundary sites per end (default 2)");
  localization->add_option("--factor", factor, "minimum weight ratio over unflagged states (default 5)");
  localization->add_option("--weights", weights_path, "write the boundary-weight table here instead of stderr");

  protocol->add_option("--input", input, "bell:<state>, random, file:<report.csv>, 4 reals dd,du,ud,uu or 8 re,im values");
  protocol->add_option("--seed", seed, "seed for --input random");
  protocol->add_flag("--site-order", site_order, "report qubits in site order (n-1, n) instead of mirrored");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "E_ARG: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*spectrum) return run_spectrum(chain, output);
    if (*couplings) return run_couplings(chain, output);
    if (*fidelity) return run_fidelity(chain, drive, state, tmin, tmax, samples, output);
    if (*localization) return run_localization(chain, depth, factor, weights_path, output);
    if (*phase) return run_phase(chain, drive, output);
    if (*protocol) return run_protocol(chain, drive, input, seed, site_order, output);
  } catch (const pst::error& e) {
    std::cerr << e.code() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
