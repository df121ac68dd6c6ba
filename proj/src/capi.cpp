#include "elwave/elwave.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "experiment.hpp"
#include "solvers.hpp"
#include "sparse.hpp"
#include "spectrum.hpp"

using namespace elwave;

struct elwave_config {
  ExperimentConfig cfg;
};

struct elwave_system {
  std::unique_ptr<StructuredQuadMesh> mesh;
  std::unique_ptr<SchemeSystem> sys;
};

struct elwave_matrix {
  SparseOperator op;
};

namespace {

thread_local std::string g_last_error = "no error";

elwave_status record(const std::exception& e, elwave_status status) {
  g_last_error = e.what();
  return status;
}

template <typename F>
elwave_status guarded(F&& f) {
  try {
    f();
    return ELWAVE_OK;
  } catch (const IndefiniteMatrixError& e) {
    return record(e, ELWAVE_ERR_INDEFINITE);
  } catch (const SolverFailure& e) {
    return record(e, ELWAVE_ERR_SOLVER);
  } catch (const std::invalid_argument& e) {
    return record(e, ELWAVE_ERR_INVALID_ARGUMENT);
  } catch (const std::ios_base::failure& e) {
    return record(e, ELWAVE_ERR_IO);
  } catch (const std::exception& e) {
    return record(e, ELWAVE_ERR_RUNTIME);
  } catch (...) {
    g_last_error = "unknown error";
    return ELWAVE_ERR_RUNTIME;
  }
}

elwave_status require(bool ok, const char* message) {
  if (ok) {
    return ELWAVE_OK;
  }
  g_last_error = message;
  return ELWAVE_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* elwave_version(void) { return "0.1.0"; }

const char* elwave_last_error(void) { return g_last_error.c_str(); }

elwave_config* elwave_config_create(void) {
  try {
    return new elwave_config{};
  } catch (...) {
    g_last_error = "allocation failure";
    return nullptr;
  }
}

elwave_config* elwave_config_load(const char* path) {
  if (!path) {
    g_last_error = "path is NULL";
    return nullptr;
  }
  elwave_config* config = nullptr;
  const elwave_status status =
      guarded([&] { config = new elwave_config{parse_config_file(path)}; });
  return status == ELWAVE_OK ? config : nullptr;
}

void elwave_config_destroy(elwave_config* config) { delete config; }

elwave_status elwave_config_set(elwave_config* config, const char* key, const char* value) {
  if (elwave_status s = require(config && key && value, "config, key and value must be non-NULL");
      s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { apply_override(config->cfg, key, value); });
}

elwave_status elwave_config_get(const elwave_config* config, const char* key, char* buf,
                                size_t capacity) {
  if (elwave_status s = require(config && key && buf && capacity > 0,
                                "config, key and a non-empty buffer are required");
      s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] {
    const std::string name(key);
    // Keys omitted from the resolved text when empty.
    const bool optional_key = name == "schemes" || name == "gamma0_list" ||
                              name == "tau_list" || name == "emit_matrix";
    std::string value;
    bool found = false;
    std::istringstream lines(config->cfg.resolved_text());
    std::string line;
    const std::string prefix = name + " = ";
    while (std::getline(lines, line)) {
      if (line.rfind(prefix, 0) == 0) {
        value = line.substr(prefix.size());
        found = true;
        break;
      }
    }
    if (!found && !optional_key) {
      throw std::invalid_argument("unknown config key '" + name + "'");
    }
    std::strncpy(buf, value.c_str(), capacity - 1);
    buf[capacity - 1] = '\0';
  });
}

elwave_status elwave_config_apply_full(elwave_config* config) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { apply_full_scale(config->cfg); });
}

elwave_status elwave_run_convergence(const elwave_config* config) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { run_convergence(config->cfg); });
}

elwave_status elwave_run_condnum(const elwave_config* config) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { run_condnum_sweep(config->cfg); });
}

elwave_status elwave_run_spectrum(const elwave_config* config) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { run_spectrum_study(config->cfg); });
}

elwave_status elwave_run_field(const elwave_config* config, double tau) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] {
    run_field_dump(config->cfg, tau > 0.0 ? tau : config->cfg.tau);
  });
}

elwave_status elwave_run_assemble(const elwave_config* config) {
  if (elwave_status s = require(config != nullptr, "config is NULL"); s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { run_assemble(config->cfg); });
}

elwave_system* elwave_system_create(const elwave_config* config) {
  if (!config) {
    g_last_error = "config is NULL";
    return nullptr;
  }
  elwave_system* system = nullptr;
  const elwave_status status = guarded([&] {
    const ExperimentConfig& cfg = config->cfg;
    cfg.validate();
    auto holder = std::make_unique<elwave_system>();
    holder->mesh = std::make_unique<StructuredQuadMesh>(build_unit_square_mesh(cfg.n, true));
    holder->sys = std::make_unique<SchemeSystem>(*holder->mesh, cfg.material(), cfg.scheme,
                                                cfg.gamma0, cfg.p,
                                                manufactured_problem(cfg.material()));
    system = holder.release();
  });
  return status == ELWAVE_OK ? system : nullptr;
}

void elwave_system_destroy(elwave_system* system) { delete system; }

int elwave_system_dofs(const elwave_system* system) {
  return system ? system->sys->state_size() : 0;
}

elwave_matrix* elwave_system_matrix(const elwave_system* system, elwave_matrix_kind kind,
                                    double tau) {
  if (!system) {
    g_last_error = "system is NULL";
    return nullptr;
  }
  elwave_matrix* matrix = nullptr;
  const elwave_status status = guarded([&] {
    switch (kind) {
      case ELWAVE_MATRIX_MASS:
        matrix = new elwave_matrix{system->sys->mass()};
        return;
      case ELWAVE_MATRIX_STIFFNESS:
        matrix = new elwave_matrix{system->sys->stiffness()};
        return;
      case ELWAVE_MATRIX_CONDENSED:
        matrix = new elwave_matrix{system->sys->condensed(tau)};
        return;
    }
    throw std::invalid_argument("unknown matrix kind");
  });
  return status == ELWAVE_OK ? matrix : nullptr;
}

void elwave_matrix_destroy(elwave_matrix* matrix) { delete matrix; }

int elwave_matrix_rows(const elwave_matrix* matrix) { return matrix ? matrix->op.rows() : 0; }

int elwave_matrix_cols(const elwave_matrix* matrix) { return matrix ? matrix->op.cols() : 0; }

long long elwave_matrix_nonzeros(const elwave_matrix* matrix) {
  return matrix ? matrix->op.nonzeros() : 0;
}

const int* elwave_matrix_row_offsets(const elwave_matrix* matrix) {
  return matrix ? matrix->op.row_offsets() : nullptr;
}

const int* elwave_matrix_col_indices(const elwave_matrix* matrix) {
  return matrix ? matrix->op.col_indices() : nullptr;
}

const double* elwave_matrix_values(const elwave_matrix* matrix) {
  return matrix ? matrix->op.values() : nullptr;
}

elwave_status elwave_matrix_write(const elwave_matrix* matrix, const char* path) {
  if (elwave_status s = require(matrix && path, "matrix and path must be non-NULL");
      s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] { write_matrix_market(matrix->op, path); });
}

elwave_status elwave_matrix_condition_number(const elwave_matrix* matrix, double* kappa) {
  if (elwave_status s = require(matrix && kappa, "matrix and kappa must be non-NULL");
      s != ELWAVE_OK) {
    return s;
  }
  return guarded([&] {
    if (matrix->op.is_symmetric(1e-10)) {
      *kappa = condition_number_spd(matrix->op).kappa;
    } else {
      *kappa = condition_number_general(matrix->op);
    }
  });
}

}  // extern "C"
