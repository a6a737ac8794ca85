# riskgap tests package
