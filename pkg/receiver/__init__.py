# Receiver package
