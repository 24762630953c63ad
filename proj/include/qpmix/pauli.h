#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qpmix {

/// Phase-free Pauli string in symplectic (x, z) form. Qubit q carries X iff bit q
/// of x_mask is set, Z iff bit q of z_mask is set, Y iff both.
///
/// Text form is "IXYZ" with qubit 0 leftmost.
class PauliString {
   public:
    static constexpr size_t kMaxQubits = 64;

    PauliString() = default;
    /// Identity on n qubits.
    explicit PauliString(size_t n_qubits);
    PauliString(size_t n_qubits, uint64_t x_mask, uint64_t z_mask);

    static PauliString from_str(std::string_view text);
    /// Single-qubit Pauli `axis` ('I', 'X', 'Y', 'Z') on `qubit` of an n-qubit register.
    static PauliString single(size_t n_qubits, size_t qubit, char axis);
    static PauliString all_z(size_t n_qubits);

    size_t n_qubits() const { return n_qubits_; }
    uint64_t x_mask() const { return x_mask_; }
    uint64_t z_mask() const { return z_mask_; }

    /// 'I', 'X', 'Y' or 'Z' on qubit q.
    char at(size_t q) const;
    bool is_identity() const { return (x_mask_ | z_mask_) == 0; }
    /// Number of qubits acted on nontrivially.
    size_t weight() const;
    /// Indices of qubits acted on nontrivially, ascending.
    std::vector<size_t> support() const;
    /// Number of Y factors; P = i^{num_y} X^x Z^z.
    int num_y() const;
    /// True when every factor is I or Z.
    bool is_diagonal() const { return x_mask_ == 0; }

    std::string str() const;

    bool operator==(const PauliString &other) const = default;

   private:
    size_t n_qubits_ = 0;
    uint64_t x_mask_ = 0;
    uint64_t z_mask_ = 0;
};

/// True iff p and q commute (even number of anticommuting single-qubit pairs).
bool commutes(const PauliString &p, const PauliString &q);

/// The Pauli operators commuting with a single-qubit generator p that the twirl
/// averages over: {identity, p}.
std::vector<PauliString> commuting_subgroup(const PauliString &p);

}  // namespace qpmix
