#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elwave/elwave.h"

namespace {

struct ConfigDeleter {
  void operator()(elwave_config* c) const { elwave_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<elwave_config, ConfigDeleter>;

int fail(const std::string& what) {
  std::fprintf(stderr, "elwave: %s: %s\n", what.c_str(), elwave_last_error());
  return 1;
}

int apply_extras(elwave_config* config, const std::vector<std::string>& extras) {
  for (const std::string& raw : extras) {
    std::string item = raw;
    if (item.rfind("--", 0) == 0) {
      item = item.substr(2);
    }
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "elwave: expected --key=value, got '%s'\n", raw.c_str());
      return 2;
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (elwave_config_set(config, key.c_str(), value.c_str()) != ELWAVE_OK) {
      return fail("override --" + key);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time discretization toolkit for 2D elastic waves"};
  app.set_version_flag("--version", elwave_version());
  app.require_subcommand(1);
  app.allow_extras();

  std::string config_path;
  std::string out_dir;
  std::string emit_prefix;
  bool full = false;
  bool dump_trajectory = false;
  auto* config_opt = app.add_option("--config", config_path, "key = value configuration file");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  app.add_flag("--full", full, "full-scale card (n = 40)");
  auto* emit_opt =
      app.add_option("--emit-matrix", emit_prefix, "Matrix Market path prefix for M, A and K");
  auto* dump_opt =
      app.add_flag("--dump-trajectory", dump_trajectory, "write per-interval state histories");

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"convergence", "manufactured-solution error sweep over the time-step halvings"},
      {"condnum", "condition numbers of the condensed matrix over (scheme, gamma0, tau)"},
      {"spectrum", "normalized eigenvalue clusters of the condensed matrix"},
      {"field", "run one simulation and dump the final nodal field"},
      {"assemble", "assemble and export the operators without time stepping"},
  };
  for (const auto& c : commands) {
    app.add_subcommand(c.name, c.help)->fallthrough()->allow_extras();
  }

  CLI11_PARSE(app, argc, argv);

  ConfigPtr config(config_opt->count() ? elwave_config_load(config_path.c_str())
                                       : elwave_config_create());
  if (!config) {
    return fail("configuration");
  }
  if (out_opt->count() &&
      elwave_config_set(config.get(), "out", out_dir.c_str()) != ELWAVE_OK) {
    return fail("--out");
  }
  if (emit_opt->count() &&
      elwave_config_set(config.get(), "emit_matrix", emit_prefix.c_str()) != ELWAVE_OK) {
    return fail("--emit-matrix");
  }
  if (dump_opt->count() &&
      elwave_config_set(config.get(), "dump_trajectory", "true") != ELWAVE_OK) {
    return fail("--dump-trajectory");
  }
  if (full && elwave_config_apply_full(config.get()) != ELWAVE_OK) {
    return fail("--full");
  }
  if (const int rc = apply_extras(config.get(), app.remaining(true)); rc != 0) {
    return rc;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  elwave_status status = ELWAVE_OK;
  if (name == "convergence") {
    status = elwave_run_convergence(config.get());
  } else if (name == "condnum") {
    status = elwave_run_condnum(config.get());
  } else if (name == "spectrum") {
    status = elwave_run_spectrum(config.get());
  } else if (name == "field") {
    status = elwave_run_field(config.get(), 0.0);
  } else if (name == "assemble") {
    status = elwave_run_assemble(config.get());
  }
  if (status != ELWAVE_OK) {
    return fail(name);
  }

  char resolved_out[1024];
  if (elwave_config_get(config.get(), "out", resolved_out, sizeof(resolved_out)) == ELWAVE_OK) {
    std::printf("%s: outputs written to %s\n", name.c_str(), resolved_out);
  }
  return 0;
}
