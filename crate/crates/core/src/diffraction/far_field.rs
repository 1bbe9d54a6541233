use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffractionOrder {
    pub n: u32,
    /// θ_n = arcsin(nλ/d), rad.
    pub angle: f64,
    /// x_n = L2·tan θ_n, m.
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldOrders {
    pub orders: Vec<DiffractionOrder>,
    /// Orders with nλ ≥ d, which do not propagate.
    pub evanescent: Vec<u32>,
}

/// Grating-equation positions of orders 0..=n_max on a screen at `distance`.
pub fn far_field_orders(wavelength: f64, period: f64, distance: f64, n_max: u32) -> FarFieldOrders {
    let mut orders = Vec::new();
    let mut evanescent = Vec::new();
    for n in 0..=n_max {
        let sin = n as f64 * wavelength / period;
        if sin >= 1.0 {
            evanescent.push(n);
            continue;
        }
        let angle = sin.asin();
        orders.push(DiffractionOrder {
            n,
            angle,
            position: distance * angle.tan(),
        });
    }
    FarFieldOrders { orders, evanescent }
}
