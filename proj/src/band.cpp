#include "curstat/band.hpp"

#include "curstat/errors.hpp"

#include <string>

namespace curstat {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::smle_classical: return "smle-classical";
    case Method::smle_studentized: return "smle-studentized";
    case Method::sen_xu: return "sen-xu";
    case Method::banerjee_wellner: return "banerjee-wellner";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method method : {Method::smle_classical, Method::smle_studentized, Method::sen_xu,
                        Method::banerjee_wellner}) {
    if (name == to_string(method)) return method;
  }
  throw InvalidInput("unknown method '" + std::string(name) +
                     "' (expected smle-classical, smle-studentized, sen-xu or banerjee-wellner)");
}

}  // namespace curstat
