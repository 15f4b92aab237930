#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace superquad {

enum class ErrorKind {
  domain,
  parameter,
  dimension,
  order,
  not_psd,
  singular,
  classification,
  interval,
  root_bracket,
  computation,
  generation,
  map,
  config,
  input,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::order: return "order";
    case ErrorKind::not_psd: return "not_psd";
    case ErrorKind::singular: return "singular";
    case ErrorKind::classification: return "classification";
    case ErrorKind::interval: return "interval";
    case ErrorKind::root_bracket: return "root_bracket";
    case ErrorKind::computation: return "computation";
    case ErrorKind::generation: return "generation";
    case ErrorKind::map: return "map";
    case ErrorKind::config: return "config";
    case ErrorKind::input: return "input";
  }
  return "unknown";
}

/// Base of every error raised by the library. The kind is what the CLI and the
/// suite runner dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SUPERQUAD_DEFINE_ERROR(Name, Kind) \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

SUPERQUAD_DEFINE_ERROR(DomainError, domain);
SUPERQUAD_DEFINE_ERROR(ParameterError, parameter);
SUPERQUAD_DEFINE_ERROR(DimensionError, dimension);
SUPERQUAD_DEFINE_ERROR(OrderError, order);
SUPERQUAD_DEFINE_ERROR(NotPsdError, not_psd);
SUPERQUAD_DEFINE_ERROR(SingularityError, singular);
SUPERQUAD_DEFINE_ERROR(ClassificationError, classification);
SUPERQUAD_DEFINE_ERROR(IntervalError, interval);
SUPERQUAD_DEFINE_ERROR(RootBracketError, root_bracket);
SUPERQUAD_DEFINE_ERROR(ComputationError, computation);
SUPERQUAD_DEFINE_ERROR(GenerationError, generation);
SUPERQUAD_DEFINE_ERROR(MapError, map);
SUPERQUAD_DEFINE_ERROR(ConfigError, config);
SUPERQUAD_DEFINE_ERROR(InputError, input);

#undef SUPERQUAD_DEFINE_ERROR

}  // namespace superquad
