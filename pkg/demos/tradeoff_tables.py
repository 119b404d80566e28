"""Print repair-bandwidth and secure-capacity comparison tables."""

from iamsr import bandwidth_table, secrecy_table, to_csv

print("repair bandwidth for B = k^2 (IA code vs. generic MSR at d = k and d = 2k - 1):")
print(to_csv(bandwidth_table(10)))

print("secure file size for k = 30, l1 = 1 as l2 grows:")
print(to_csv(secrecy_table(30, 1)))
