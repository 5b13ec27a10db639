#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

/// An election instance failed validation; carries every violation found.
class invalid_instance : public std::invalid_argument {
public:
    explicit invalid_instance(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid instance";
        for (const auto& s : v) {
            out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

/// The exact solvers refuse inputs above their configured item cap.
class size_limit_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero total variance handed to a Berry-Esseen style bound.
class degenerate_input : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A gadget parameter would not survive conversion to double exactly.
class precision_loss : public std::range_error {
public:
    using std::range_error::range_error;
};

/// A dynamic program exceeded its state budget (theoretical mode only;
/// practical mode truncates and flags instead).
class state_space_overflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bvu
