# Display package