#pragma once

// Command-line front end. Every command prints one JSON report on stdout.
//
// Exit codes: 0 ok, 1 computation error, 2 malformed input or usage,
// 3 model/map validation failure.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "ctrace/coincidence.hpp"
#include "ctrace/exact_linalg.hpp"
#include "ctrace/graded_ring.hpp"
#include "ctrace/manifest.hpp"
#include "ctrace/spectral.hpp"
#include "ctrace/sphere_example.hpp"

namespace ctrace::cli {

using manifest::json;

enum ExitCode : int { ok = 0, compute_error = 1, input_error = 2, invalid = 3 };

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) !=
      1)
    throw ComputeError("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// Loads manifests, resolves spaces by name and records input digests.
class Session {
public:
  json inputs = json::array();

  std::string read(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    inputs.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    return text;
  }

  ModelPtr load_space(const std::string &path) {
    auto model = manifest::parse_space(manifest::parse_json(read(path)));
    auto bad = validate_model(*model);
    if (!bad.empty())
      throw ValidationError("space '" + model->name() + "' in '" + path +
                                "' is invalid",
                            bad);
    spaces_[model->name()] = model;
    return model;
  }

  void add_search_dir(const std::string &file) {
    dirs_.push_back(std::filesystem::path(file).parent_path());
  }

  ModelPtr resolve(const std::string &name) {
    if (auto it = spaces_.find(name); it != spaces_.end())
      return it->second;
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    for (const auto &dir : dirs_)
      for (const auto &stem : {name, lower}) {
      auto candidate = dir / (stem + ".json");
      if (std::filesystem::exists(candidate)) {
        auto m = load_space(candidate.string());
        if (m->name() != name)
          throw InputError("'" + candidate.string() + "' declares space '" +
                           m->name() + "', expected '" + name + "'");
        return m;
      }
      }
    throw InputError("unknown space '" + name +
                     "' (pass --space or place " + name +
                     ".json next to the map)");
  }

  RingMap load_map(const std::string &path) {
    add_search_dir(path);
    auto j = manifest::parse_json(read(path));
    auto f = manifest::parse_map(j, [this](const std::string &n) {
      return resolve(n);
    });
    auto bad = validate_map(f);
    if (!bad.empty())
      throw ValidationError("map '" + f.name() + "' in '" + path +
                                "' is invalid",
                            bad);
    return f;
  }

private:
  std::map<std::string, ModelPtr> spaces_;
  std::vector<std::filesystem::path> dirs_;
};

/// Parses "x", "-x" or "k*x" into a class of the base.
inline CohomologyClass parse_class_expr(const ModelPtr &model,
                                        const std::string &expr) {
  static const std::regex scaled(R"(^\s*(-?\d+)\s*\*\s*(\S+)\s*$)");
  static const std::regex plain(R"(^\s*(-?)(\S+)\s*$)");
  std::smatch m;
  Integer k = 1;
  std::string label;
  if (std::regex_match(expr, m, scaled)) {
    k = Integer(m[1].str());
    label = m[2];
  } else if (std::regex_match(expr, m, plain)) {
    k = m[1].str().empty() ? 1 : -1;
    label = m[2];
  } else {
    throw InputError("cannot parse class expression '" + expr + "'");
  }
  if (!model->find(label))
    throw InputError("unknown generator '" + label + "' in '" + expr + "'");
  return k * CohomologyClass::generator(model, label);
}

/// Runs one command line (without the program name); writes the report to
/// `out` and diagnostics to `err`; returns the exit code.
inline int run_command(const std::vector<std::string> &args, std::ostream &out,
                       std::ostream &err) {
  CLI::App app{"Coincidence Lefschetz and Reidemeister traces"};
  app.name("ctrace");
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  Session session;
  json arguments = json::object();
  json results = json::object();

  std::string map_file, f_file, g_file, base_file, euler_expr, matrix_file,
      validate_file;
  std::vector<std::string> space_files;
  long long n = 0, k = 0, m = 0, hopf_f = 0, hopf_g = 0;

  auto *lef = app.add_subcommand("lefschetz", "Lefschetz number of a self-map");
  lef->add_option("--map", map_file, "map manifest")->required();
  lef->add_option("--space", space_files, "space manifest (repeatable)");

  auto *coi = app.add_subcommand("coincide",
                                 "primary class and lambda(f,g) of a pair");
  coi->add_option("--f", f_file, "map manifest of f")->required();
  coi->add_option("--g", g_file, "map manifest of g")->required();
  coi->add_option("--space", space_files, "space manifest (repeatable)");

  auto *self = app.add_subcommand("selfcoincide", "chi(N) f^*(u)");
  self->add_option("--f", f_file, "map manifest")->required();
  self->add_option("--space", space_files, "space manifest (repeatable)");

  auto *s1 = app.add_subcommand(
      "s1bundle", "self-coincidence trace of p: E^k_n -> CP^n");
  s1->add_option("--n", n, "complex dimension of the base")->required();
  s1->add_option("--k", k, "Euler class multiple")->required();

  auto *sph = app.add_subcommand(
      "sphere", "coincidence trace of f, g: S^m -> S^n (Hopf invariants are "
                "taken as given; odd values exist only for n = 2, 4, 8)");
  sph->add_option("--m", m, "source dimension")->required();
  sph->add_option("--n", n, "target dimension")->required();
  sph->add_option("--hopf-f", hopf_f, "Hopf invariant of f")->required();
  sph->add_option("--hopf-g", hopf_g, "Hopf invariant of g")->required();

  auto *gys = app.add_subcommand("gysin", "cohomology of a circle bundle");
  gys->add_option("--base", base_file, "space manifest of the base")
      ->required();
  gys->add_option("--euler", euler_expr, "Euler class: label or k*label")
      ->required();

  auto *snf_cmd = app.add_subcommand("snf", "Smith normal form of a matrix");
  snf_cmd->add_option("--matrix", matrix_file, "JSON matrix file")
      ->required();

  auto *val = app.add_subcommand("validate", "validate a space or map");
  val->add_option("file", validate_file, "manifest")->required();
  val->add_option("--space", space_files, "space manifest (repeatable)");

  std::string command;
  auto emit = [&](int code, const std::string &message,
                  const std::vector<std::string> &violations) {
    json report;
    report["command"] = command;
    report["arguments"] = arguments;
    report["inputs"] = session.inputs;
    if (code == ExitCode::ok) {
      report["results"] = results;
      report["status"] = "ok";
    } else {
      json e{{"code", code}, {"message", message}};
      if (!violations.empty())
        e["violations"] = violations;
      report["error"] = e;
      report["status"] = "error";
      err << "ctrace: " << message << "\n";
      for (const auto &v : violations)
        err << "  - " << v << "\n";
    }
    out << report.dump(2) << "\n";
    return code;
  };

  try {
    std::vector<const char *> argv{"ctrace"};
    for (const auto &a : args)
      argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitCode::ok;
  } catch (const CLI::ParseError &e) {
    for (auto *sub : app.get_subcommands())
      command = sub->get_name();
    return emit(ExitCode::input_error, e.what(), {});
  }
  for (auto *sub : app.get_subcommands())
    command = sub->get_name();
  for (auto *sub : app.get_subcommands())
    for (const auto *opt : sub->get_options()) {
      if (opt->get_name() == "--help" || opt->count() == 0)
        continue;
      auto res = opt->results();
      const auto key = opt->get_single_name();
      arguments[key] = res.size() == 1 ? json(res.front()) : json(res);
    }

  try {
    for (const auto &s : space_files)
      session.load_space(s);

    if (*lef) {
      const auto f = session.load_map(map_file);
      const auto h = self_map_homology(f);
      json traces = json::array();
      for (const auto &M : h.degrees)
        traces.push_back(manifest::from_integer(M.trace()));
      results["traces"] = traces;
      results["lefschetz_number"] =
          manifest::from_integer(lefschetz_number(h));
    } else if (*coi) {
      const auto f = session.load_map(f_file);
      const auto g = session.load_map(g_file);
      const auto cls = coincidence_class(f, g);
      results["primary_class"] = manifest::class_to_json(cls);
      results["degree"] = cls.degree();
      results["nonzero"] = !cls.is_zero();
      if (f.source()->torsion_free() && f.target()->torsion_free()) {
        const auto rep = coincidence_report(f, g);
        results["rho_image_M"] = manifest::class_to_json(rep.rho_image_M);
        results["lambda_N"] = manifest::class_to_json(rep.lambda_N);
        results["lambda_N_via_g"] = manifest::class_to_json(
            homology_pushforward(g, rep.rho_image_M));
      } else {
        results["rho_image_M"] = nullptr;
        results["lambda_N"] = nullptr;
      }
    } else if (*self) {
      const auto f = session.load_map(f_file);
      const auto cls = self_coincidence_class(f);
      results["class"] = manifest::class_to_json(cls);
      results["degree"] = cls.degree();
      results["euler_characteristic"] =
          manifest::from_integer(euler_characteristic(*f.source()));
      results["nonzero"] = !cls.is_zero();
    } else if (*s1) {
      const auto r = s1_bundle_reidemeister(static_cast<int>(n), Integer(k));
      results["n"] = r.n;
      results["k"] = manifest::from_integer(r.k);
      results["h1_hoeq"] = manifest::to_json(r.h1_hoeq);
      results["trace"] = r.trivial_bundle
                             ? r.trace.str()
                             : r.trace.str() + " mod " + r.k.str();
      results["trace_residue"] = manifest::from_integer(r.trace);
      results["trace_modulus"] = manifest::from_integer(r.k);
      results["trivial_bundle"] = r.trivial_bundle;
      results["nonzero"] = r.nonzero;
      results["nielsen_tilde"] = r.nielsen_tilde;
      results["nielsen"] = r.nielsen;
      results["gysin_residue"] = manifest::from_integer(r.gysin_residue);
    } else if (*sph) {
      const auto r = sphere_reidemeister(SphereCoincidenceInput{
          static_cast<int>(m), static_cast<int>(n), hopf_f, hopf_g});
      results["regime"] = to_string(r.regime);
      results["trace"] = manifest::from_integer(r.trace_value);
      results["nielsen_tilde"] = r.nielsen_tilde;
      results["nielsen"] = r.nielsen;
    } else if (*gys) {
      const auto base = session.load_space(base_file);
      const auto e = parse_class_expr(base, euler_expr);
      if (e.degree() != 2)
        throw InputError("Euler class must have degree 2");
      const auto g = gysin_cohomology(base, e);
      json degrees = json::object();
      for (std::size_t i = 0; i < g.degrees.size(); ++i) {
        const auto &d = g.degrees[i];
        degrees[std::to_string(i)] = {
            {"cokernel_piece", manifest::to_json(d.cokernel_piece)},
            {"kernel_piece", manifest::to_json(d.kernel_piece)},
            {"resolved", d.resolved ? manifest::to_json(*d.resolved)
                                    : json(nullptr)}};
      }
      results["dimension"] = g.dimension;
      results["degrees"] = degrees;
      try {
        results["total_space"] =
            manifest::to_json(*circle_bundle(base, e).total);
      } catch (const ComputeError &) {
        results["total_space"] = nullptr;
      }
    } else if (*snf_cmd) {
      auto j = manifest::parse_json(session.read(matrix_file));
      if (j.is_object() && j.contains("matrix"))
        j = j.at("matrix");
      if (!j.is_array())
        throw InputError("matrix file must hold a list of rows");
      std::vector<IntVector> rows;
      for (const auto &row : j) {
        if (!row.is_array())
          throw InputError("matrix rows must be lists");
        IntVector r;
        for (const auto &x : row)
          r.push_back(manifest::to_integer(x, "matrix entry"));
        rows.push_back(std::move(r));
      }
      const auto d = snf(IntMatrix::from_rows(rows));
      json divisors = json::array();
      for (const auto &x : d.divisors())
        divisors.push_back(manifest::from_integer(x));
      results["U"] = manifest::to_json(d.U);
      results["D"] = manifest::to_json(d.D);
      results["V"] = manifest::to_json(d.V);
      results["divisors"] = divisors;
      results["rank"] = d.rank();
    } else if (*val) {
      auto j = manifest::parse_json(session.read(validate_file));
      if (j.is_object() && j.contains("matrices")) {
        session.add_search_dir(validate_file);
        auto f = manifest::parse_map(
            j, [&](const std::string &s) { return session.resolve(s); });
        auto bad = validate_map(f);
        if (!bad.empty())
          throw ValidationError("map '" + f.name() + "' is invalid", bad);
        results["kind"] = "map";
        results["name"] = f.name();
      } else {
        auto model = manifest::parse_space(j);
        auto bad = validate_model(*model);
        if (!bad.empty())
          throw ValidationError("space '" + model->name() + "' is invalid",
                                bad);
        results["kind"] = "space";
        results["name"] = model->name();
        results["torsion_free"] = model->torsion_free();
        results["euler_characteristic"] =
            manifest::from_integer(euler_characteristic(*model));
      }
      results["valid"] = true;
    }
  } catch (const ValidationError &e) {
    return emit(ExitCode::invalid, e.what(), e.violations());
  } catch (const InputError &e) {
    return emit(ExitCode::input_error, e.what(), {});
  } catch (const ComputeError &e) {
    return emit(ExitCode::compute_error, e.what(), {});
  } catch (const std::exception &e) {
    return emit(ExitCode::compute_error, e.what(), {});
  }
  return emit(ExitCode::ok, "", {});
}

} // namespace ctrace::cli
