#pragma once

#include <stdexcept>
#include <string>

namespace dgen {

// Base for everything thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: files, schemas, configs, out-of-domain values.
// The CLI maps these to exit code 1.
class validation_error : public error {
public:
    using error::error;
};

class schema_error : public validation_error {
public:
    using validation_error::validation_error;
};

class parse_error : public validation_error {
public:
    using validation_error::validation_error;
};

class domain_error : public validation_error {
public:
    using validation_error::validation_error;
};

class dimension_error : public validation_error {
public:
    using validation_error::validation_error;
};

class config_error : public validation_error {
public:
    using validation_error::validation_error;
};

// Runtime failures: broken caller contracts and numerical breakdowns.
// The CLI maps these to exit code 2.
class contract_error : public error {
public:
    using error::error;
};

class numerical_error : public error {
public:
    using error::error;
};

class divergence_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

} // namespace dgen
