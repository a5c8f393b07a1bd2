// rsrd command-line harness: training, R-D curve sweeps, pattern dumps, and
// FER simulation with reproducible seeds and CSV output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rsrd/pipeline.hpp"

using json = nlohmann::ordered_json;
using namespace rsrd;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int n = 255, k = 239, q = 8, primitive_poly = 0x11D;
  std::vector<double> ebno_db;
  std::vector<std::string> schemes;
  int tau = 1000;
  int frames = 3000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

json to_json(const ExperimentConfig& c) {
  return json{{"n", c.n},
              {"k", c.k},
              {"q", c.q},
              {"primitive_poly", c.primitive_poly},
              {"ebno_db", c.ebno_db},
              {"schemes", c.schemes},
              {"tau", c.tau},
              {"frames", c.frames},
              {"seed", c.seed},
              {"out_dir", c.out_dir}};
}

ExperimentConfig default_config(bool small) {
  ExperimentConfig c;
  if (small) {
    c.n = 15;
    c.k = 11;
    c.q = 4;
    c.primitive_poly = 0b10011;
    c.tau = 200;
    c.frames = 500;
    for (double e = 4.6; e < 6.21; e += 0.4) c.ebno_db.push_back(e);
    c.schemes = {"single-bm", "gmd", "sed-4-4", "mbm-1-4", "mbm-2-4", "hm74-4"};
  } else {
    for (double e = 4.6; e < 6.21; e += 0.2) c.ebno_db.push_back(e);
    c.schemes = {"single-bm", "gmd",     "sed-12-12", "mbm-1-4",   "mbm-1-7",
                 "mbm-1-11",  "mbm-2-4", "mbm-2-7",   "mbm-2-11",  "mbm-3-4",
                 "mbm-3-7",   "mbm-3-11", "hm74-4",   "hm74-11",   "basd-11",
                 "masd-2-11", "masd-3-11", "masd2a-11"};
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, bool small) {
  ExperimentConfig c = default_config(small);
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("n", c.n);
  get("k", c.k);
  get("q", c.q);
  get("primitive_poly", c.primitive_poly);
  get("ebno_db", c.ebno_db);
  get("schemes", c.schemes);
  get("tau", c.tau);
  get("frames", c.frames);
  get("seed", c.seed);
  get("out_dir", c.out_dir);
  return c;
}

/// Scheme names: single-bm | gmd | sed-L-F | mbm-L-R | hm74-R | basd-R |
/// masd-M-R | masd2a-R.
Scheme parse_scheme(const std::string& name) {
  std::vector<std::string> part;
  std::stringstream ss(name);
  for (std::string tok; std::getline(ss, tok, '-');) part.push_back(tok);
  auto num = [&](size_t i) {
    if (i >= part.size()) throw ConfigError("scheme missing parameter: " + name);
    try {
      return std::stoi(part[i]);
    } catch (...) {
      throw ConfigError("bad scheme parameter in: " + name);
    }
  };
  Scheme sc;
  if (name == "single-bm") {
    sc.kind = Scheme::Kind::SingleBm;
  } else if (part[0] == "gmd") {
    sc.kind = Scheme::Kind::Gmd;
  } else if (part[0] == "sed") {
    sc.kind = Scheme::Kind::Sed;
    sc.l = num(1);
    sc.f = num(2);
  } else if (part[0] == "mbm") {
    sc.kind = Scheme::Kind::Mbm;
    sc.l = num(1);
    sc.R = num(2);
  } else if (part[0] == "hm74") {
    sc.kind = Scheme::Kind::Hm74;
    sc.R = num(1);
  } else if (part[0] == "basd") {
    sc.kind = Scheme::Kind::BitAsd;
    sc.R = num(1);
  } else if (part[0] == "masd2a") {
    sc.kind = Scheme::Kind::Masd2a;
    sc.m = 2;
    sc.R = num(1);
  } else if (part[0] == "masd") {
    sc.kind = Scheme::Kind::Masd;
    sc.m = num(1);
    sc.R = num(2);
  } else {
    throw ConfigError("unknown scheme: " + name);
  }
  return sc;
}

std::vector<Scheme> load_schemes(const ExperimentConfig& c) {
  std::vector<Scheme> out;
  for (const auto& name : c.schemes) {
    Scheme sc = parse_scheme(name);
    try {
      (void)sc.measure(c.n, c.k);  // validate measure preconditions at load
    } catch (const std::exception& e) {
      throw ConfigError("scheme " + name + " invalid for (" + std::to_string(c.n) + "," +
                        std::to_string(c.k) + "): " + e.what());
    }
    out.push_back(sc);
  }
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::size_t h = std::hash<std::string>{}(to_json(c).dump());
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016zx", h);
  return buf;
}

std::string ebno_tag(double ebno) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ebno);
  return buf;
}

std::filesystem::path profile_path(const ExperimentConfig& c, double ebno) {
  std::ostringstream name;
  name << "profile_n" << c.n << "_ebno" << ebno_tag(ebno) << "_tau" << c.tau << "_seed"
       << c.seed << ".json";
  return std::filesystem::path(c.out_dir) / name.str();
}

void ensure_out_dir(const ExperimentConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
}

void write_profile(const TrainedProfile& prof, const std::filesystem::path& path) {
  json j{{"q", prof.q},          {"n", prof.n},
         {"tau", prof.tau},      {"seed", prof.seed},
         {"ebno_db", prof.ebno_db}, {"code_rate", prof.code_rate},
         {"p_bar", prof.p_bar},  {"bit_rel", prof.bit_rel}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1, '\t') << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

TrainedProfile read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing profile " + path.string() + " (run `rsrd train` first)");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("profile parse error in " + path.string() + ": " + e.what());
  }
  TrainedProfile prof;
  prof.q = j.at("q").get<int>();
  prof.n = j.at("n").get<int>();
  prof.tau = j.at("tau").get<int>();
  prof.seed = j.at("seed").get<std::uint64_t>();
  prof.ebno_db = j.at("ebno_db").get<double>();
  prof.code_rate = j.at("code_rate").get<double>();
  prof.p_bar = j.at("p_bar").get<std::vector<std::vector<double>>>();
  prof.bit_rel = j.at("bit_rel").get<std::vector<double>>();
  return prof;
}

RsCode make_code(const ExperimentConfig& c) {
  try {
    return RsCode(Field(c.q, static_cast<unsigned>(c.primitive_poly)), c.n, c.k);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad code parameters: ") + e.what());
  }
}

TrainedProfile profile_for(const ExperimentConfig& c, const RsCode& code, double ebno,
                           bool allow_train) {
  const auto path = profile_path(c, ebno);
  if (std::filesystem::exists(path)) return read_profile(path);
  if (!allow_train) throw IoError("missing profile " + path.string());
  const ChannelConfig cfg{ebno, static_cast<double>(c.k) / c.n, c.q};
  auto prof = train(code, cfg, c.tau, c.seed);
  ensure_out_dir(c);
  write_profile(prof, path);
  return prof;
}

std::ofstream open_csv(const ExperimentConfig& c, const std::string& name) {
  ensure_out_dir(c);
  const auto path = std::filesystem::path(c.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# config_hash=" << config_hash(c) << " seed=" << c.seed << "\n";
  std::printf("writing %s\n", path.string().c_str());
  return out;
}

int cmd_train(const ExperimentConfig& c) {
  if (c.tau == 1) std::fprintf(stderr, "warning: tau=1 trains on a single frame\n");
  const auto code = make_code(c);
  ensure_out_dir(c);
  for (const double ebno : c.ebno_db) {
    const auto path = profile_path(c, ebno);
    if (std::filesystem::exists(path)) {
      std::printf("profile exists, skipping: %s\n", path.string().c_str());
      continue;
    }
    const ChannelConfig cfg{ebno, static_cast<double>(c.k) / c.n, c.q};
    write_profile(train(code, cfg, c.tau, c.seed), path);
    std::printf("trained %s\n", path.string().c_str());
  }
  return 0;
}

int cmd_rd_curve(const ExperimentConfig& c) {
  const auto code = make_code(c);
  const auto schemes = load_schemes(c);
  auto out = open_csv(c, "rd_curve.csv");
  out << "ebno_db,scheme,s,rate_bits,distortion\n";
  for (const double ebno : c.ebno_db) {
    const auto prof = profile_for(c, code, ebno, /*allow_train=*/false);
    for (const auto& sc : schemes) {
      if (sc.kind == Scheme::Kind::SingleBm) continue;  // no curve: one pattern
      const auto dm = sc.measure(c.n, c.k);
      const SourceModel src =
          sc.bit_level() ? prof.bit_source() : prof.symbol_source(sc.error_l());
      const auto zero = zero_rate_point(src, dm);
      out << ebno_tag(ebno) << ',' << sc.name() << ",0,0," << zero.distortion << "\n";
      for (int i = 0; i < 120; ++i) {
        const double s = -0.05 * std::pow(12.0 / 0.05, i / 119.0);
        const auto pt = factored_rd(src, dm, s);
        out << ebno_tag(ebno) << ',' << sc.name() << ',' << s << ',' << pt.rate << ','
            << pt.distortion << "\n";
      }
    }
  }
  if (!out) throw IoError("write failed for rd_curve.csv");
  return 0;
}

int cmd_fer(const ExperimentConfig& c, bool oracle, int threads) {
  const auto code = make_code(c);
  const auto schemes = load_schemes(c);
  auto out = open_csv(c, "fer.csv");
  out << "ebno_db,scheme,rate_bits,frames,errors,fer,ci_lo,ci_hi,mean_candidates,oracle\n";
  for (const double ebno : c.ebno_db) {
    const ChannelConfig cfg{ebno, static_cast<double>(c.k) / c.n, c.q};
    const auto prof = profile_for(c, code, ebno, /*allow_train=*/true);
    for (const auto& sc : schemes) {
      FerOptions opt;
      opt.frames = c.frames;
      opt.seed = c.seed;
      opt.oracle = oracle;
      opt.threads = threads;
      const auto res = fer_experiment(code, cfg, prof, sc, opt);
      const bool used_oracle = oracle || sc.oracle_only();
      out << ebno_tag(ebno) << ',' << sc.name() << ',' << sc.R << ',' << res.frames << ','
          << res.errors << ',' << res.fer << ',' << res.ci_lo << ',' << res.ci_hi << ','
          << res.mean_candidates << ',' << (used_oracle ? 1 : 0) << "\n";
      std::printf("%5.2f dB  %-14s FER %.3e  [%.3e, %.3e]%s\n", ebno, sc.name().c_str(),
                  res.fer, res.ci_lo, res.ci_hi, used_oracle ? "  (oracle)" : "");
    }
  }
  if (!out) throw IoError("write failed for fer.csv");
  return 0;
}

int cmd_patterns(const ExperimentConfig& c) {
  const auto code = make_code(c);
  const auto schemes = load_schemes(c);
  const double ebno = c.ebno_db.empty() ? 5.2 : c.ebno_db.front();
  const auto prof = profile_for(c, code, ebno, /*allow_train=*/true);
  ensure_out_dir(c);
  for (const auto& sc : schemes) {
    const auto dm = sc.measure(c.n, c.k);
    PatternSet ps;
    auto rng = stream_rng(c.seed, 0);
    switch (sc.kind) {
      case Scheme::Kind::SingleBm:
        ps.scheme = "single-BM";
        ps.patterns.push_back(ErasurePattern(c.n, 1));
        break;
      case Scheme::Kind::Gmd:
        ps = gmd_set(c.n, code.d_min());
        break;
      case Scheme::Kind::Sed:
        ps = sed_set(sc.l, sc.f, c.n);
        break;
      case Scheme::Kind::Hm74: {
        const auto cov = hamming74();
        const auto full = prof.symbol_source(2);
        SourceModel tail;
        tail.dists.assign(full.dists.begin() + cov.n_c, full.dists.end());
        const auto rd = rd_at_rate(tail, dm, sc.R - cov.k_c);
        ps = covering_hybrid_set(cov, rd, sc.R, c.n, rng);
        break;
      }
      default: {
        const SourceModel src =
            sc.bit_level() ? prof.bit_source() : prof.symbol_source(sc.error_l());
        const auto rd = rd_at_rate(src, dm, sc.R);
        ps = random_set(rd, sc.R, dm.col_letter_offset, rng);
        break;
      }
    }
    std::string fname = "patterns_" + sc.name() + ".txt";
    for (auto& ch : fname)
      if (ch == '(' || ch == ')' || ch == ',') ch = '_';
    const auto path = std::filesystem::path(c.out_dir) / fname;
    std::ofstream dump(path, std::ios::binary);
    if (!dump) throw IoError("cannot write " + path.string());
    dump << "# scheme=" << sc.name() << " R=" << sc.R << " seed=" << c.seed
         << " count=" << ps.patterns.size() << "\n";
    for (const auto& p : ps.patterns) {
      for (const auto letter : p) dump << static_cast<char>('0' + letter);
      dump << "\n";
    }
    if (!dump) throw IoError("write failed for " + path.string());
    std::printf("wrote %zu patterns to %s\n", ps.patterns.size(), path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate-distortion-guided multiple-trial Reed-Solomon decoding"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool oracle = false, small = false;
  app.add_option("--config", config_path, "flat JSON experiment config");
  app.add_option("--seed", seed_override, "override the master seed");
  app.add_option("--threads", threads, "worker threads for FER simulation");
  app.add_flag("--oracle", oracle, "use the distortion-threshold genie instead of BM trials");
  app.add_flag("--small", small, "use the (15,11) GF(16) preset");
  app.add_option("--out", out_override, "override the output directory");

  auto* sub_train = app.add_subcommand("train", "train channel profiles");
  auto* sub_rd = app.add_subcommand("rd-curve", "sweep R-D curves to CSV");
  auto* sub_fer = app.add_subcommand("fer", "run FER experiments to CSV");
  auto* sub_pat = app.add_subcommand("patterns", "dump pattern sets to text");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path, small);
    if (seed_override) cfg.seed = *seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (cfg.ebno_db.empty()) throw ConfigError("ebno_db list is empty");
    if (cfg.frames < 1 || cfg.tau < 1) throw ConfigError("frames and tau must be >= 1");

    if (sub_train->parsed()) return cmd_train(cfg);
    if (sub_rd->parsed()) return cmd_rd_curve(cfg);
    if (sub_fer->parsed()) return cmd_fer(cfg, oracle, std::max(1, threads));
    if (sub_pat->parsed()) return cmd_patterns(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
