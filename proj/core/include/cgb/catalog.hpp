#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgb/expression.hpp"
#include "cgb/scene.hpp"

namespace cgb {

/// One reference number attached to a catalog scene: the target, the
/// tolerance a verification at the entry's reference orders is expected to
/// meet, and a note recording how the number was obtained.
struct ExpectedValue {
    std::string key;
    double value = 0.0;
    double tolerance = 0.0;
    std::string note;
};

/// A validated scene bundled with reference values. Integral expectations are
/// pinned at `reference_order` quadrature nodes per axis; pointwise ones hold
/// at every point of the named stratum.
struct CatalogEntry {
    Scene scene;
    int reference_order = 16;
    std::vector<ExpectedValue> expected;

    const ExpectedValue* find(const std::string& key) const;
    /// Throws input_error when the key is missing.
    const ExpectedValue& at(const std::string& key) const;
};

/// Product of two flat unit disks in polar coordinates. One labeled face per
/// disk factor, one corner torus, Euler characteristic 1. Every integrand is
/// constant on its stratum, so this entry pins exact totals.
CatalogEntry flat_bidisk();

/// Flat upper half of the unit 4-ball in polar coordinates: the round
/// hemisphere as the M face, the equatorial 3-ball as the N face, and the
/// equatorial 2-sphere as the corner. Exercises curved faces and coordinate
/// degeneracies at the polar axes.
CatalogEntry hemiball();

/// Flat torus times a sheared square: constant metric with an off-diagonal
/// term, four totally geodesic corners at angles pi/3 and 2*pi/3, Euler
/// characteristic 0. Every density vanishes identically, so the entry
/// isolates the oblique-angle bookkeeping.
CatalogEntry sheared_corner();

/// Catalog names in presentation order.
const std::vector<std::string>& catalog_names();
/// Entry by name; throws input_error for unknown names.
CatalogEntry catalog_entry(const std::string& name);

/// Same charts and Euler characteristic with `amplitude * omega` installed as
/// the conformal exponent. Piecewise expectations do not survive a conformal
/// change, so only the topological ones are kept, at the tolerance the
/// conformal runs are graded at. Throws input_error when omega breaks the
/// identification on a periodic axis.
CatalogEntry conformal_variant(const CatalogEntry& base, const Expression& omega,
                               double amplitude);

/// Conformal variant with a seeded exponent drawn from a smooth basis adapted
/// to the entry's chart (respects periodic axes and polar degeneracies).
/// Coefficients are scaled so |omega| <= amplitude over the box.
CatalogEntry seeded_conformal_variant(const CatalogEntry& base, std::uint64_t seed,
                                      double amplitude);

} // namespace cgb
