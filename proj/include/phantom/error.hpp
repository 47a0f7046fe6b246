#pragma once

#include <stdexcept>
#include <string>

namespace phantom {

// Exit-code categories: usage=2, data=3, transport=4.
enum class ErrorKind { Usage, Data, Transport };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Data: return 3;
        case ErrorKind::Transport: return 4;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorKind::Usage, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::Data, msg); }
inline Error transport_error(const std::string& msg) { return Error(ErrorKind::Transport, msg); }

} // namespace phantom
