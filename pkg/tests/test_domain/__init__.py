# Domain Tests
