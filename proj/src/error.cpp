#include "sieve/error.hpp"

namespace sieve {

void throw_domain(const std::string& what) { throw DomainError(what); }
void throw_input(const std::string& what) { throw InputError(what); }

}  // namespace sieve
