use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One firm-year observation. Productivity is `c = sales / employees`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductivityRecord {
    firm_id: String,
    year: i32,
    sector_id: String,
    sales: f64,
    employees: u64,
    c: f64,
}

impl ProductivityRecord {
    pub fn new(
        firm_id: impl Into<String>,
        year: i32,
        sector_id: impl Into<String>,
        sales: f64,
        employees: u64,
    ) -> Result<Self> {
        if employees == 0 {
            return Err(Error::Domain(
                "employees must be at least 1 (productivity would divide by zero)".into(),
            ));
        }
        if !(sales.is_finite() && sales > 0.0) {
            return Err(Error::Domain(format!(
                "sales must be finite and positive, got {sales}"
            )));
        }
        Ok(Self {
            firm_id: firm_id.into(),
            year,
            sector_id: sector_id.into(),
            sales,
            employees,
            c: sales / employees as f64,
        })
    }

    pub fn firm_id(&self) -> &str {
        &self.firm_id
    }
    pub fn year(&self) -> i32 {
        self.year
    }
    pub fn sector_id(&self) -> &str {
        &self.sector_id
    }
    /// Sales (production) `Y` in currency units.
    pub fn sales(&self) -> f64 {
        self.sales
    }
    /// Labour `L` in persons.
    pub fn employees(&self) -> u64 {
        self.employees
    }
    /// Mean labour productivity `Y / L`.
    pub fn c(&self) -> f64 {
        self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn productivity_is_sales_per_employee() {
        let r = ProductivityRecord::new("f1", 2005, "s1", 100e6, 50).unwrap();
        assert_eq!(r.c(), 2e6);
    }

    #[test]
    fn rejects_zero_employees_and_bad_sales() {
        assert!(ProductivityRecord::new("f", 2005, "s", 1.0, 0).is_err());
        assert!(ProductivityRecord::new("f", 2005, "s", -1.0, 3).is_err());
        assert!(ProductivityRecord::new("f", 2005, "s", f64::NAN, 3).is_err());
    }
}
