#pragma once

#include <utility>
#include <variant>

namespace jsonreward {

/// Value-or-error return, for operations whose failure is ordinary data.
template <class T, class E>
class Result {
   public:
    Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<0>(v_); }
    T& value() & { return std::get<0>(v_); }
    T&& value() && { return std::get<0>(std::move(v_)); }
    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

    const E& error() const { return std::get<1>(v_); }

   private:
    std::variant<T, E> v_;
};

}  // namespace jsonreward
