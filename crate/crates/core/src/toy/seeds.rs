//! Real places with their conventional names, mixed into the toy corpus.

/// Names in `render::LANGS` order: en de fr es it ru uk el he ka ko.
pub const SEED_PLACES: &[[&str; 11]] = &[
    ["Moscow", "Moskau", "Moscou", "Moscú", "Mosca", "Москва", "Москва", "Μόσχα", "מוסקבה", "მოსკოვი", "모스크바"],
    ["London", "London", "Londres", "Londres", "Londra", "Лондон", "Лондон", "Λονδίνο", "לונדון", "ლონდონი", "런던"],
    ["Berlin", "Berlin", "Berlin", "Berlín", "Berlino", "Берлин", "Берлін", "Βερολίνο", "ברלין", "ბერლინი", "베를린"],
    ["Paris", "Paris", "Paris", "París", "Parigi", "Париж", "Париж", "Παρίσι", "פריז", "პარიზი", "파리"],
    ["Rome", "Rom", "Rome", "Roma", "Roma", "Рим", "Рим", "Ρώμη", "רומא", "რომი", "로마"],
    ["Athens", "Athen", "Athènes", "Atenas", "Atene", "Афины", "Афіни", "Αθήνα", "אתונה", "ათენი", "아테네"],
    ["Jerusalem", "Jerusalem", "Jérusalem", "Jerusalén", "Gerusalemme", "Иерусалим", "Єрусалим", "Ιερουσαλήμ", "ירושלים", "იერუსალიმი", "예루살렘"],
    ["Tbilisi", "Tiflis", "Tbilissi", "Tiflis", "Tbilisi", "Тбилиси", "Тбілісі", "Τιφλίδα", "טביליסי", "თბილისი", "트빌리시"],
    ["Seoul", "Seoul", "Séoul", "Seúl", "Seul", "Сеул", "Сеул", "Σεούλ", "סיאול", "სეული", "서울"],
    ["Kyiv", "Kiew", "Kiev", "Kiev", "Kiev", "Киев", "Київ", "Κίεβο", "קייב", "კიევი", "키이우"],
    ["Vienna", "Wien", "Vienne", "Viena", "Vienna", "Вена", "Відень", "Βιέννη", "וינה", "ვენა", "빈"],
    ["Madrid", "Madrid", "Madrid", "Madrid", "Madrid", "Мадрид", "Мадрид", "Μαδρίτη", "מדריד", "მადრიდი", "마드리드"],
    ["Munich", "München", "Munich", "Múnich", "Monaco di Baviera", "Мюнхен", "Мюнхен", "Μόναχο", "מינכן", "მიუნხენი", "뮌헨"],
    ["Germany", "Deutschland", "Allemagne", "Alemania", "Germania", "Германия", "Німеччина", "Γερμανία", "גרמניה", "გერმანია", "독일"],
    ["Warsaw", "Warschau", "Varsovie", "Varsovia", "Varsavia", "Варшава", "Варшава", "Βαρσοβία", "ורשה", "ვარშავა", "바르샤바"],
    ["Prague", "Prag", "Prague", "Praga", "Praga", "Прага", "Прага", "Πράγα", "פראג", "პრაღა", "프라하"],
    ["Haifa", "Haifa", "Haïfa", "Haifa", "Haifa", "Хайфа", "Хайфа", "Χάιφα", "חיפה", "ჰაიფა", "하이파"],
    ["Odessa", "Odessa", "Odessa", "Odesa", "Odessa", "Одесса", "Одеса", "Οδησσός", "אודסה", "ოდესა", "오데사"],
    ["Batumi", "Batumi", "Batoumi", "Batumi", "Batumi", "Батуми", "Батумі", "Βατούμι", "בטומי", "ბათუმი", "바투미"],
    ["Busan", "Busan", "Busan", "Busan", "Busan", "Пусан", "Пусан", "Πουσάν", "בוסאן", "პუსანი", "부산"],
];

/// Latin-script renderings tagged with a non-Latin language, as found in
/// real gazetteers. Ingest drops them.
pub const SEED_PRE_ROMANISED: &[(usize, &str, &str)] = &[(0, "ru", "Moskva"), (3, "ru", "Parizh"), (8, "ko", "Seoul")];
