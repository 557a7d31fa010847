# Framing package
