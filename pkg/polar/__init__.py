# Polar code package
