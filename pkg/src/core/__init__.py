# Core package: rationals, finite sets, formulas, cells and normal forms
