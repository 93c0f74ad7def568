# Services package: order elimination, coding, set elimination, normal forms, interiors and acceptance
