#include "qpmix/pauli.h"

#include <bit>

#include "qpmix/errors.h"

namespace qpmix {

namespace {

uint64_t mask_for(size_t n) {
    return n == 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
}

void check_size(size_t n) {
    if (n == 0 || n > PauliString::kMaxQubits) {
        throw ArgumentError("PauliString qubit count must be in [1, 64], got " + std::to_string(n));
    }
}

}  // namespace

PauliString::PauliString(size_t n_qubits) : n_qubits_(n_qubits) {
    check_size(n_qubits);
}

PauliString::PauliString(size_t n_qubits, uint64_t x_mask, uint64_t z_mask)
    : n_qubits_(n_qubits), x_mask_(x_mask), z_mask_(z_mask) {
    check_size(n_qubits);
    if (((x_mask | z_mask) & ~mask_for(n_qubits)) != 0) {
        throw ArgumentError("PauliString masks have bits beyond qubit " + std::to_string(n_qubits - 1));
    }
}

PauliString PauliString::from_str(std::string_view text) {
    if (text.empty()) {
        throw ArgumentError("empty Pauli string");
    }
    PauliString result(text.size());
    for (size_t q = 0; q < text.size(); q++) {
        uint64_t bit = uint64_t{1} << q;
        switch (text[q]) {
            case 'I':
            case '_':
                break;
            case 'X':
                result.x_mask_ |= bit;
                break;
            case 'Y':
                result.x_mask_ |= bit;
                result.z_mask_ |= bit;
                break;
            case 'Z':
                result.z_mask_ |= bit;
                break;
            default:
                throw ArgumentError("bad Pauli character '" + std::string(1, text[q]) + "' in \"" +
                                    std::string(text) + "\"");
        }
    }
    return result;
}

PauliString PauliString::single(size_t n_qubits, size_t qubit, char axis) {
    if (qubit >= n_qubits) {
        throw ArgumentError("qubit " + std::to_string(qubit) + " out of range for " +
                            std::to_string(n_qubits) + " qubits");
    }
    std::string text(n_qubits, 'I');
    text[qubit] = axis;
    return from_str(text);
}

PauliString PauliString::all_z(size_t n_qubits) {
    check_size(n_qubits);
    return PauliString(n_qubits, 0, mask_for(n_qubits));
}

char PauliString::at(size_t q) const {
    bool x = (x_mask_ >> q) & 1;
    bool z = (z_mask_ >> q) & 1;
    return "IZXY"[(x << 1) | z];
}

size_t PauliString::weight() const {
    return std::popcount(x_mask_ | z_mask_);
}

std::vector<size_t> PauliString::support() const {
    std::vector<size_t> out;
    for (size_t q = 0; q < n_qubits_; q++) {
        if (((x_mask_ | z_mask_) >> q) & 1) {
            out.push_back(q);
        }
    }
    return out;
}

int PauliString::num_y() const {
    return std::popcount(x_mask_ & z_mask_);
}

std::string PauliString::str() const {
    std::string out(n_qubits_, 'I');
    for (size_t q = 0; q < n_qubits_; q++) {
        out[q] = at(q);
    }
    return out;
}

bool commutes(const PauliString &p, const PauliString &q) {
    if (p.n_qubits() != q.n_qubits()) {
        throw ArgumentError("commutes: size mismatch (" + std::to_string(p.n_qubits()) + " vs " +
                            std::to_string(q.n_qubits()) + ")");
    }
    int anti = std::popcount((p.x_mask() & q.z_mask()) ^ (p.z_mask() & q.x_mask()));
    return (anti & 1) == 0;
}

std::vector<PauliString> commuting_subgroup(const PauliString &p) {
    if (p.weight() != 1) {
        throw UnsupportedError("commuting_subgroup: only single-qubit generators are twirled, got " + p.str());
    }
    return {PauliString(p.n_qubits()), p};
}

}  // namespace qpmix
